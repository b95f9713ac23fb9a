#pragma once

#include <optional>
#include <span>
#include <vector>

namespace airsense {

struct MpsParams {
  int n = 25;            // batch size
  int p = 5;             // persistence count
  double epsilon = 0.5;  // agreement tolerance, m/s
};

// Mean of the first persistent window of p sorted predictions, or failure
// when no such window exists within the batch.
struct MpsOutcome {
  std::optional<double> value;

  bool failed() const { return !value.has_value(); }
};

// Minimum persistent value of one batch. len(arr) must equal params.n and
// all entries must be finite. Throws LENGTH_MISMATCH, NON_FINITE_PREDICTION,
// INVALID_PARAMS (n >= p >= 2, epsilon > 0 enforced).
MpsOutcome minimum_persisting_value(std::span<const double> arr,
                                    const MpsParams& params);

struct MpsBatch {
  size_t batch_index = 0;
  MpsOutcome outcome;
};

// Partitions predictions into consecutive non-overlapping batches of n;
// trailing partial batch discarded.
std::vector<MpsBatch> mps_stream(std::span<const double> predictions,
                                 const MpsParams& params);

}  // namespace airsense
