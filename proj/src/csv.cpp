#include "airsense/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "airsense/error.hpp"

namespace airsense {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("MALFORMED_CSV", "bad numeric field '" + s + "' in " + path);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IO_ERROR", "cannot open " + path + " for writing");
  return f;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("NOT_FOUND", "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

void write_feature_csv(const std::string& path,
                       const std::vector<FeatureRow>& rows) {
  auto f = open_out(path);
  const size_t k = rows.empty() ? 0 : rows.front().features.size();
  const bool labeled = !rows.empty() && rows.front().airflow_mps.has_value();
  f << "t_ms";
  for (size_t i = 0; i < k; ++i) f << ",f" << i;
  if (labeled) f << ",airflow_mps,vent_on";
  f << "\n";
  for (const auto& row : rows) {
    f << format_double(row.t_ms);
    for (double v : row.features) f << "," << format_double(v);
    if (labeled) {
      f << "," << format_double(row.airflow_mps.value()) << ","
        << row.vent_on.value();
    }
    f << "\n";
  }
  if (!f) throw Error("IO_ERROR", "write failed for " + path);
}

std::vector<FeatureRow> read_feature_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw Error("MALFORMED_CSV", path + " is empty");
  const auto header = split_csv_line(lines[0]);
  if (header.empty() || header[0] != "t_ms")
    throw Error("MALFORMED_CSV", "unexpected header in " + path);
  const bool labeled = header.size() >= 2 && header.back() == "vent_on";
  const size_t k = header.size() - 1 - (labeled ? 2 : 0);

  std::vector<FeatureRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != header.size())
      throw Error("MALFORMED_CSV",
                  "row " + std::to_string(i) + " has wrong arity in " + path);
    FeatureRow row;
    row.t_ms = parse_double(fields[0], path);
    for (size_t j = 0; j < k; ++j) {
      row.features.push_back(parse_double(fields[1 + j], path));
    }
    if (labeled) {
      row.airflow_mps = parse_double(fields[1 + k], path);
      row.vent_on = static_cast<int>(parse_double(fields[2 + k], path));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_label_csv(const std::string& path, const GroundTruth& truth) {
  auto f = open_out(path);
  f << "t_ms,airflow_mps,vent_on\n";
  for (const auto& e : truth.entries) {
    f << format_double(static_cast<double>(e.frame_index) * 16.0) << ","
      << format_double(e.airflow_mps) << "," << e.vent_on << "\n";
  }
  if (!f) throw Error("IO_ERROR", "write failed for " + path);
}

GroundTruth read_label_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || split_csv_line(lines[0]).size() != 3)
    throw Error("MALFORMED_CSV", "unexpected label header in " + path);
  GroundTruth truth;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 3)
      throw Error("MALFORMED_CSV",
                  "row " + std::to_string(i) + " has wrong arity in " + path);
    GroundTruthEntry e;
    e.frame_index =
        static_cast<size_t>(std::llround(parse_double(fields[0], path) / 16.0));
    e.airflow_mps = parse_double(fields[1], path);
    e.vent_on = static_cast<int>(parse_double(fields[2], path));
    truth.entries.push_back(e);
  }
  return truth;
}

}  // namespace airsense
