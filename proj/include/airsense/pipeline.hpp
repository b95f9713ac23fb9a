#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airsense/audio.hpp"
#include "airsense/csv.hpp"
#include "airsense/gbdt.hpp"
#include "airsense/mps.hpp"
#include "airsense/silence.hpp"
#include "airsense/synth.hpp"

namespace airsense {

struct DutyCycle {
  double sense_s = 60.0;
  double interval_s = 60.0;
};

struct PipelineConfig {
  double cutoff_hz = kDefaultCutoffHz;
  SilenceConfig silence;
  std::optional<MpsParams> mps = MpsParams{};  // nullopt disables smoothing
  std::optional<DutyCycle> duty;               // nullopt = always sensing
};

struct NaivePrediction {
  double start_ms = 0.0;
  double vent_prob = 0.0;
  double airflow_mps = 0.0;
};

struct SmoothedPrediction {
  size_t batch_index = 0;
  double span_start_ms = 0.0;
  double span_end_ms = 0.0;
  MpsOutcome outcome;
};

struct GateStats {
  size_t total = 0;
  size_t duty_skipped = 0;
  size_t gated_out = 0;  // too loud: failed the silence gate
  size_t processed = 0;
};

struct PredictionSeries {
  std::vector<NaivePrediction> naive;
  std::vector<SmoothedPrediction> smoothed;
  GateStats stats;
};

// Full inference chain: duty window -> silence gate on raw frames ->
// whole-clip low-pass (delay-compensated, re-framed on the same grid) ->
// features -> classifier/regressor -> MPS over the naive airflow stream.
PredictionSeries process_clip(const AudioClip& clip, const PipelineConfig& cfg,
                              const GbdtModel& classifier,
                              const GbdtModel& regressor);

// Ungated training-data path: low-pass at cutoff, features for every frame,
// labels joined from ground truth. Row count == min(frames, truth entries).
std::vector<LabeledSample> build_dataset(const AudioClip& clip,
                                         const GroundTruth& truth,
                                         double cutoff_hz = kDefaultCutoffHz);

std::vector<FeatureRow> dataset_to_rows(std::span<const LabeledSample> samples);
std::vector<LabeledSample> rows_to_dataset(std::span<const FeatureRow> rows);

struct SweepRow {
  double cutoff_hz = 0.0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

// Re-extracts features at each cutoff, trains a fresh regressor, and
// evaluates train/test MSE. Deterministic per cutoff.
std::vector<SweepRow> sweep_cutoff(const AudioClip& train_clip,
                                   const GroundTruth& train_truth,
                                   const AudioClip& test_clip,
                                   const GroundTruth& test_truth,
                                   std::span<const double> cutoffs,
                                   const HyperParams& hp);

// Prediction CSVs: naive `t_ms,vent_prob,airflow_naive`, batches
// `batch,span_ms,airflow_mps|FAIL` with span as start-end.
void write_naive_csv(const std::string& path, const PredictionSeries& series);
void write_batch_csv(const std::string& path, const PredictionSeries& series);
std::vector<NaivePrediction> read_naive_csv(const std::string& path);

}  // namespace airsense
