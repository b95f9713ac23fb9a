#pragma once

#include <optional>
#include <string>
#include <vector>

#include "airsense/synth.hpp"

namespace airsense {

// Shortest decimal form that round-trips the exact double (std::to_chars).
std::string format_double(double v);

// One row of the feature/label CSV: `t_ms,f0..fK,airflow_mps,vent_on`.
// Label columns are optional (feature-only dumps omit them).
struct FeatureRow {
  double t_ms = 0.0;
  std::vector<double> features;
  std::optional<double> airflow_mps;
  std::optional<int> vent_on;
};

void write_feature_csv(const std::string& path,
                       const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(const std::string& path);

// Ground-truth label CSV: `t_ms,airflow_mps,vent_on`, one row per frame.
void write_label_csv(const std::string& path, const GroundTruth& truth);
GroundTruth read_label_csv(const std::string& path);

}  // namespace airsense
