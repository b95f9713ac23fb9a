#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace airsense {

// All library failures carry a stable machine-readable code string; the CLI
// prints it verbatim and maps it to exit code 1.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

private:
  std::string code_;
};

}  // namespace airsense
