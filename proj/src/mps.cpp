#include "airsense/mps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airsense/error.hpp"

namespace airsense {

namespace {

void validate(const MpsParams& params) {
  // p == 1 would return the second-smallest element or fail outright (the
  // window-length check runs after the first comparison), so degenerate p
  // is rejected rather than silently misbehaving.
  if (params.p < 2 || params.n < params.p || !(params.epsilon > 0.0))
    throw Error("INVALID_PARAMS", "require n >= p >= 2 and epsilon > 0");
}

double mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

MpsOutcome minimum_persisting_value(std::span<const double> arr,
                                    const MpsParams& params) {
  validate(params);
  if (static_cast<int>(arr.size()) != params.n)
    throw Error("LENGTH_MISMATCH",
                "expected batch of " + std::to_string(params.n) + ", got " +
                    std::to_string(arr.size()));
  for (double x : arr) {
    if (!std::isfinite(x))
      throw Error("NON_FINITE_PREDICTION", "non-finite value in batch");
  }

  std::vector<double> sorted(arr.begin(), arr.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> window{sorted[0]};
  for (int i = 1; i < params.n; ++i) {
    if (std::abs(mean(window) - sorted[i]) <= params.epsilon) {
      window.push_back(sorted[i]);
    } else {
      window.assign(1, sorted[i]);
    }
    if (static_cast<int>(window.size()) == params.p) {
      return MpsOutcome{mean(window)};
    }
  }
  return MpsOutcome{};  // failure
}

std::vector<MpsBatch> mps_stream(std::span<const double> predictions,
                                 const MpsParams& params) {
  validate(params);
  std::vector<MpsBatch> out;
  const size_t n = static_cast<size_t>(params.n);
  for (size_t start = 0; start + n <= predictions.size(); start += n) {
    MpsBatch b;
    b.batch_index = start / n;
    b.outcome = minimum_persisting_value(predictions.subspan(start, n), params);
    out.push_back(b);
  }
  return out;
}

}  // namespace airsense
