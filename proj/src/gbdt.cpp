#include "airsense/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "airsense/error.hpp"

namespace airsense {

std::string task_name(Task task) {
  return task == Task::classify ? "classify" : "regress";
}

Task parse_task(const std::string& name) {
  if (name == "classify") return Task::classify;
  if (name == "regress") return Task::regress;
  throw Error("INVALID_PARAMS", "unknown task '" + name + "'");
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best exhaustive split over features x midpoints of consecutive distinct
// sorted values; criterion is squared-error reduction on the gradients.
// Ties resolved to the lowest feature index, then lowest threshold, by
// scanning in that order and requiring strict improvement.
SplitChoice best_split(std::span<const LabeledSample> samples,
                       std::span<const double> grad,
                       std::span<const size_t> idx, int n_features) {
  const size_t n = idx.size();
  double sum_g = 0.0;
  for (size_t i : idx) sum_g += grad[i];
  const double parent_term = sum_g * sum_g / static_cast<double>(n);

  SplitChoice best;
  std::vector<std::pair<double, double>> vg(n);  // (feature value, gradient)
  for (int f = 0; f < n_features; ++f) {
    for (size_t j = 0; j < n; ++j) {
      vg[j] = {samples[idx[j]].features[f], grad[idx[j]]};
    }
    std::sort(vg.begin(), vg.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double left_sum = 0.0;
    for (size_t j = 0; j + 1 < n; ++j) {
      left_sum += vg[j].second;
      if (vg[j].first == vg[j + 1].first) continue;  // not a boundary
      const double threshold = vg[j].first + (vg[j + 1].first - vg[j].first) / 2.0;
      const size_t nl = j + 1;
      const size_t nr = n - nl;
      const double right_sum = sum_g - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) -
                          parent_term;
      if (gain > best.gain) {
        best = {true, f, threshold, gain};
      }
    }
  }
  if (best.gain <= 0.0) best.found = false;
  return best;
}

struct TreeBuilder {
  std::span<const LabeledSample> samples;
  std::span<const double> grad;     // current residuals / gradients
  std::span<const double> hess;     // classification only; empty for regress
  const HyperParams& hp;
  int n_features;
  Tree tree;
  std::vector<int> leaf_of_sample;  // node index each sample lands in

  double leaf_value(std::span<const size_t> idx) const {
    double g = 0.0;
    for (size_t i : idx) g += grad[i];
    if (hess.empty()) {
      return g / static_cast<double>(idx.size());  // mean residual
    }
    double h = 0.0;
    for (size_t i : idx) h += hess[i];
    return g / (h + 1e-12);  // Newton step
  }

  int build(std::vector<size_t>& idx, int depth) {
    const int node_id = static_cast<int>(tree.size());
    tree.emplace_back();

    SplitChoice split;
    if (depth < hp.max_depth &&
        static_cast<int>(idx.size()) >= hp.min_samples_split) {
      split = best_split(samples, grad, idx, n_features);
    }
    if (!split.found) {
      tree[node_id].leaf = true;
      tree[node_id].value = leaf_value(idx);
      for (size_t i : idx) leaf_of_sample[i] = node_id;
      return node_id;
    }

    std::vector<size_t> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (size_t i : idx) {
      if (samples[i].features[split.feature] < split.threshold) {
        left_idx.push_back(i);
      } else {
        right_idx.push_back(i);
      }
    }
    idx.clear();
    idx.shrink_to_fit();

    const int left = build(left_idx, depth + 1);
    const int right = build(right_idx, depth + 1);
    tree[node_id].leaf = false;
    tree[node_id].feature = split.feature;
    tree[node_id].threshold = split.threshold;
    tree[node_id].left = left;
    tree[node_id].right = right;
    return node_id;
  }
};

double eval_tree(const Tree& tree, std::span<const double> features) {
  int node = 0;
  while (!tree[node].leaf) {
    node = features[tree[node].feature] < tree[node].threshold
               ? tree[node].left
               : tree[node].right;
  }
  return tree[node].value;
}

void validate_hp(const HyperParams& hp) {
  if (hp.n_trees < 1 || hp.max_depth < 1 || hp.min_samples_split < 2 ||
      !(hp.learning_rate > 0.0) || hp.learning_rate > 1.0)
    throw Error("INVALID_PARAMS", "bad hyperparameters");
}

}  // namespace

GbdtModel fit(Task task, std::span<const LabeledSample> samples,
              const HyperParams& hp, double cutoff_hz, int sample_rate) {
  validate_hp(hp);
  if (static_cast<int>(samples.size()) < hp.min_samples_split)
    throw Error("TOO_FEW_SAMPLES", "need at least " +
                                       std::to_string(hp.min_samples_split) +
                                       " samples");
  const int n_features = static_cast<int>(samples.front().features.size());
  std::vector<double> targets(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    if (static_cast<int>(samples[i].features.size()) != n_features)
      throw Error("FEATURE_LENGTH_MISMATCH", "inconsistent feature lengths");
    for (double v : samples[i].features) {
      if (!std::isfinite(v))
        throw Error("NON_FINITE_FEATURE", "non-finite feature value");
    }
    if (task == Task::classify) {
      if (samples[i].vent_on != 0 && samples[i].vent_on != 1)
        throw Error("NON_BINARY_LABELS", "classification label not in {0,1}");
      targets[i] = samples[i].vent_on;
    } else {
      if (!std::isfinite(samples[i].airflow_mps))
        throw Error("NON_FINITE_FEATURE", "non-finite regression target");
      targets[i] = samples[i].airflow_mps;
    }
  }

  GbdtModel model;
  model.task = task;
  model.learning_rate = hp.learning_rate;
  model.n_features = n_features;
  model.cutoff_hz = cutoff_hz;
  model.sample_rate = sample_rate;

  const size_t n = samples.size();
  if (task == Task::regress) {
    model.init_score = std::accumulate(targets.begin(), targets.end(), 0.0) /
                       static_cast<double>(n);
  } else {
    double base = std::accumulate(targets.begin(), targets.end(), 0.0) /
                  static_cast<double>(n);
    base = std::clamp(base, 1e-12, 1.0 - 1e-12);
    model.init_score = std::log(base / (1.0 - base));
  }

  std::vector<double> score(n, model.init_score);
  std::vector<double> grad(n), hess;
  if (task == Task::classify) hess.resize(n);

  model.trees.reserve(hp.n_trees);
  for (int m = 0; m < hp.n_trees; ++m) {
    for (size_t i = 0; i < n; ++i) {
      if (task == Task::regress) {
        grad[i] = targets[i] - score[i];
      } else {
        const double p = sigmoid(score[i]);
        grad[i] = targets[i] - p;
        hess[i] = p * (1.0 - p);
      }
    }
    TreeBuilder builder{samples, grad, hess, hp, n_features, {}, {}};
    builder.leaf_of_sample.assign(n, -1);
    std::vector<size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    builder.build(all, 0);

    for (size_t i = 0; i < n; ++i) {
      score[i] += hp.learning_rate * builder.tree[builder.leaf_of_sample[i]].value;
    }
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

double predict_prefix(const GbdtModel& model, std::span<const double> features,
                      size_t n_trees_used) {
  if (static_cast<int>(features.size()) != model.n_features)
    throw Error("FEATURE_LENGTH_MISMATCH",
                "model expects " + std::to_string(model.n_features) +
                    " features, got " + std::to_string(features.size()));
  double score = model.init_score;
  const size_t limit = std::min(n_trees_used, model.trees.size());
  for (size_t m = 0; m < limit; ++m) {
    score += model.learning_rate * eval_tree(model.trees[m], features);
  }
  return model.task == Task::classify ? sigmoid(score) : score;
}

double predict(const GbdtModel& model, std::span<const double> features) {
  return predict_prefix(model, features, model.trees.size());
}

namespace {

nlohmann::json node_to_json(const Tree& tree, int node_id) {
  const TreeNode& node = tree[node_id];
  nlohmann::json j;
  if (node.leaf) {
    j["v"] = node.value;
  } else {
    j["f"] = node.feature;
    j["t"] = node.threshold;
    j["l"] = node_to_json(tree, node.left);
    j["r"] = node_to_json(tree, node.right);
  }
  return j;
}

int node_from_json(const nlohmann::json& j, Tree& tree) {
  const int node_id = static_cast<int>(tree.size());
  tree.emplace_back();
  if (j.contains("v")) {
    tree[node_id].leaf = true;
    tree[node_id].value = j.at("v").get<double>();
  } else {
    tree[node_id].leaf = false;
    tree[node_id].feature = j.at("f").get<int>();
    tree[node_id].threshold = j.at("t").get<double>();
    const int left = node_from_json(j.at("l"), tree);
    const int right = node_from_json(j.at("r"), tree);
    tree[node_id].left = left;
    tree[node_id].right = right;
  }
  return node_id;
}

constexpr int kFormatVersion = 1;

}  // namespace

std::string serialize_model(const GbdtModel& model) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["task"] = task_name(model.task);
  j["n_features"] = model.n_features;
  j["sample_rate"] = model.sample_rate;
  j["cutoff_hz"] = model.cutoff_hz;
  j["learning_rate"] = model.learning_rate;
  j["init_score"] = model.init_score;
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& t : model.trees) trees.push_back(node_to_json(t, 0));
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

GbdtModel deserialize_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("MALFORMED_MODEL_FILE", e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw Error("VERSION_MISMATCH",
                  "model format_version " + std::to_string(version) +
                      ", expected " + std::to_string(kFormatVersion));
    GbdtModel model;
    model.task = parse_task(j.at("task").get<std::string>());
    model.n_features = j.at("n_features").get<int>();
    model.sample_rate = j.at("sample_rate").get<int>();
    model.cutoff_hz = j.at("cutoff_hz").get<double>();
    model.learning_rate = j.at("learning_rate").get<double>();
    model.init_score = j.at("init_score").get<double>();
    for (const auto& jt : j.at("trees")) {
      Tree tree;
      node_from_json(jt, tree);
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MALFORMED_MODEL_FILE", e.what());
  }
}

void save_model(const GbdtModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IO_ERROR", "cannot open " + path + " for writing");
  const std::string text = serialize_model(model);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("IO_ERROR", "write failed for " + path);
}

GbdtModel load_model(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw Error("MODEL_NOT_FOUND", "no model file at " + path);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("IO_ERROR", "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

}  // namespace airsense
