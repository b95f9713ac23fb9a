#pragma once

#include <cstddef>
#include <span>

namespace airsense {

struct ClassificationReport {
  size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when a zero denominator forced the metric to 0 instead of failing.
  bool degenerate_precision = false;
  bool degenerate_recall = false;
  bool degenerate_f1 = false;
};

struct RegressionReport {
  double mse = 0.0;
  double r2 = 0.0;
};

// Positive class = 1 (vent on). Labels must be 0/1 and lengths equal.
ClassificationReport classification_report(std::span<const int> pred,
                                           std::span<const int> truth);

// mean((pred - truth)^2). Throws LENGTH_MISMATCH, EMPTY_INPUT.
double mse(std::span<const double> pred, std::span<const double> truth);

// 1 - SSres/SStot. Throws ZERO_VARIANCE when truth is constant; lengths >= 2.
double r2(std::span<const double> pred, std::span<const double> truth);

}  // namespace airsense
