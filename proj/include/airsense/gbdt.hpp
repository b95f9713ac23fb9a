#pragma once

#include <span>
#include <string>
#include <vector>

#include "airsense/audio.hpp"
#include "airsense/dsp.hpp"

namespace airsense {

enum class Task { classify, regress };

std::string task_name(Task task);
Task parse_task(const std::string& name);  // INVALID_PARAMS on bad name

struct HyperParams {
  int n_trees = 500;
  int max_depth = 5;
  int min_samples_split = 5;
  double learning_rate = 0.2;
};

struct LabeledSample {
  std::vector<double> features;
  double airflow_mps = 0.0;
  int vent_on = 0;
};

// One node of a regression tree in flat storage; index 0 is the root.
// Internal nodes route x[feature] < threshold to `left`, else `right`.
struct TreeNode {
  bool leaf = true;
  double value = 0.0;     // leaf score
  int feature = -1;       // internal only
  double threshold = 0.0; // internal only
  int left = -1;
  int right = -1;
};

using Tree = std::vector<TreeNode>;

struct GbdtModel {
  Task task = Task::regress;
  double init_score = 0.0;
  double learning_rate = 0.2;
  int n_features = 0;
  int sample_rate = kPipelineSampleRate;
  double cutoff_hz = kDefaultCutoffHz;
  std::vector<Tree> trees;
};

// Deterministic gradient boosting: exhaustive midpoint splits, squared-error
// reduction on current gradients, no subsampling. Regression uses L2 loss
// with mean-residual leaves; classification uses logistic loss with Newton
// leaves. Throws TOO_FEW_SAMPLES, NON_BINARY_LABELS, NON_FINITE_FEATURE.
GbdtModel fit(Task task, std::span<const LabeledSample> samples,
              const HyperParams& hp,
              double cutoff_hz = kDefaultCutoffHz,
              int sample_rate = kPipelineSampleRate);

// Regress: raw score (m/s). Classify: probability in (0,1).
double predict(const GbdtModel& model, std::span<const double> features);

// Prediction using only the first `n_trees_used` trees (for loss audits).
double predict_prefix(const GbdtModel& model, std::span<const double> features,
                      size_t n_trees_used);

// JSON text with sorted keys and shortest round-trip floats; save/load is
// the identity and round-tripped predictions are bit-identical.
void save_model(const GbdtModel& model, const std::string& path);
GbdtModel load_model(const std::string& path);

std::string serialize_model(const GbdtModel& model);
GbdtModel deserialize_model(const std::string& text);

}  // namespace airsense
