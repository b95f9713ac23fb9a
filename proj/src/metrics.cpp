#include "airsense/metrics.hpp"

#include <string>

#include "airsense/error.hpp"

namespace airsense {

ClassificationReport classification_report(std::span<const int> pred,
                                           std::span<const int> truth) {
  if (pred.size() != truth.size())
    throw Error("LENGTH_MISMATCH", "prediction and truth lengths differ");
  if (pred.empty()) throw Error("EMPTY_INPUT", "no labels to score");

  ClassificationReport r;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] != 0 && pred[i] != 1)
      throw Error("NON_BINARY_LABELS", "prediction label not in {0,1}");
    if (truth[i] != 0 && truth[i] != 1)
      throw Error("NON_BINARY_LABELS", "truth label not in {0,1}");
    if (pred[i] == 1 && truth[i] == 1) ++r.tp;
    else if (pred[i] == 1 && truth[i] == 0) ++r.fp;
    else if (pred[i] == 0 && truth[i] == 1) ++r.fn;
    else ++r.tn;
  }
  const double total = static_cast<double>(pred.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  if (r.tp + r.fp > 0) {
    r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  } else {
    r.degenerate_precision = true;
  }
  if (r.tp + r.fn > 0) {
    r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  } else {
    r.degenerate_recall = true;
  }
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.degenerate_f1 = true;
  }
  return r;
}

double mse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size())
    throw Error("LENGTH_MISMATCH", "prediction and truth lengths differ");
  if (pred.empty()) throw Error("EMPTY_INPUT", "no values to score");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double r2(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size())
    throw Error("LENGTH_MISMATCH", "prediction and truth lengths differ");
  if (truth.size() < 2) throw Error("EMPTY_INPUT", "need at least 2 values");
  double mean_t = 0.0;
  for (double t : truth) mean_t += t;
  mean_t /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double dr = truth[i] - pred[i];
    const double dt = truth[i] - mean_t;
    ss_res += dr * dr;
    ss_tot += dt * dt;
  }
  if (ss_tot == 0.0)
    throw Error("ZERO_VARIANCE", "truth values are all identical");
  return 1.0 - ss_res / ss_tot;
}

}  // namespace airsense
