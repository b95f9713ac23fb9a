#include "airsense/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "airsense/error.hpp"
#include "airsense/metrics.hpp"

namespace airsense {

namespace {

void check_model(const GbdtModel& model, Task expected_task,
                 const PipelineConfig& cfg) {
  if (model.task != expected_task)
    throw Error("MODEL_MISMATCH",
                "expected a " + task_name(expected_task) + " model");
  if (model.cutoff_hz != cfg.cutoff_hz)
    throw Error("MODEL_MISMATCH",
                "model trained at cutoff " + format_double(model.cutoff_hz) +
                    " Hz, pipeline configured for " +
                    format_double(cfg.cutoff_hz) + " Hz");
  if (model.n_features != feature_count(cfg.cutoff_hz))
    throw Error("MODEL_MISMATCH", "model feature count does not match cutoff");
}

bool in_duty_window(const std::optional<DutyCycle>& duty, double start_ms) {
  if (!duty) return true;
  const double phase = std::fmod(start_ms, duty->interval_s * 1000.0);
  return phase < duty->sense_s * 1000.0;
}

}  // namespace

PredictionSeries process_clip(const AudioClip& clip, const PipelineConfig& cfg,
                              const GbdtModel& classifier,
                              const GbdtModel& regressor) {
  check_model(classifier, Task::classify, cfg);
  check_model(regressor, Task::regress, cfg);
  if (cfg.duty && cfg.duty->sense_s > cfg.duty->interval_s)
    throw Error("INVALID_PARAMS", "duty sense_s must not exceed interval_s");

  const auto raw_frames = frames(clip);

  PredictionSeries out;
  out.stats.total = raw_frames.size();
  if (raw_frames.empty()) return out;

  // Filter once over the whole clip to avoid per-frame edge transients,
  // then re-frame on the same 256-sample grid.
  const FilterKernel kernel =
      design_lowpass({cfg.cutoff_hz, kPipelineSampleRate, 255});
  const auto filtered =
      apply_filter(kernel, std::span<const int16_t>(clip.samples));

  std::vector<double> naive_airflow;
  std::vector<size_t> naive_frame_index;
  for (const Frame& frame : raw_frames) {
    if (!in_duty_window(cfg.duty, frame.start_ms())) {
      ++out.stats.duty_skipped;
      continue;
    }
    if (!is_silent(frame, cfg.silence)) {
      ++out.stats.gated_out;
      continue;
    }
    ++out.stats.processed;
    const std::span<const double> window(
        filtered.data() + frame.index * kFrameLen, kFrameLen);
    const FeatureVector fv =
        extract_features(window, frame.start_ms(), cfg.cutoff_hz);
    NaivePrediction p;
    p.start_ms = fv.start_ms;
    p.vent_prob = predict(classifier, fv.values);
    p.airflow_mps = predict(regressor, fv.values);
    out.naive.push_back(p);
    naive_airflow.push_back(p.airflow_mps);
    naive_frame_index.push_back(frame.index);
  }

  if (cfg.mps) {
    const auto batches = mps_stream(naive_airflow, *cfg.mps);
    const size_t n = static_cast<size_t>(cfg.mps->n);
    for (const auto& b : batches) {
      SmoothedPrediction s;
      s.batch_index = b.batch_index;
      const size_t first = naive_frame_index[b.batch_index * n];
      const size_t last = naive_frame_index[b.batch_index * n + n - 1];
      s.span_start_ms = first * 16.0;
      s.span_end_ms = (last + 1) * 16.0;
      s.outcome = b.outcome;
      out.smoothed.push_back(s);
    }
  }
  return out;
}

std::vector<LabeledSample> build_dataset(const AudioClip& clip,
                                         const GroundTruth& truth,
                                         double cutoff_hz) {
  const auto raw_frames = frames(clip);
  const FilterKernel kernel =
      design_lowpass({cutoff_hz, kPipelineSampleRate, 255});
  const auto filtered =
      apply_filter(kernel, std::span<const int16_t>(clip.samples));

  const size_t count = std::min(raw_frames.size(), truth.entries.size());
  std::vector<LabeledSample> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const std::span<const double> window(filtered.data() + i * kFrameLen,
                                         kFrameLen);
    const FeatureVector fv =
        extract_features(window, raw_frames[i].start_ms(), cutoff_hz);
    LabeledSample s;
    s.features = fv.values;
    s.airflow_mps = truth.entries[i].airflow_mps;
    s.vent_on = truth.entries[i].vent_on;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<FeatureRow> dataset_to_rows(
    std::span<const LabeledSample> samples) {
  std::vector<FeatureRow> rows;
  rows.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    FeatureRow row;
    row.t_ms = static_cast<double>(i) * 16.0;
    row.features = samples[i].features;
    row.airflow_mps = samples[i].airflow_mps;
    row.vent_on = samples[i].vent_on;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LabeledSample> rows_to_dataset(std::span<const FeatureRow> rows) {
  std::vector<LabeledSample> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.airflow_mps || !row.vent_on.has_value())
      throw Error("MALFORMED_CSV", "feature rows carry no labels");
    LabeledSample s;
    s.features = row.features;
    s.airflow_mps = *row.airflow_mps;
    s.vent_on = *row.vent_on;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SweepRow> sweep_cutoff(const AudioClip& train_clip,
                                   const GroundTruth& train_truth,
                                   const AudioClip& test_clip,
                                   const GroundTruth& test_truth,
                                   std::span<const double> cutoffs,
                                   const HyperParams& hp) {
  std::vector<SweepRow> rows;
  rows.reserve(cutoffs.size());
  for (double cutoff : cutoffs) {
    const auto train = build_dataset(train_clip, train_truth, cutoff);
    const auto test = build_dataset(test_clip, test_truth, cutoff);
    const GbdtModel model = fit(Task::regress, train, hp, cutoff);

    auto eval = [&](const std::vector<LabeledSample>& data) {
      std::vector<double> pred(data.size()), truth_v(data.size());
      for (size_t i = 0; i < data.size(); ++i) {
        pred[i] = predict(model, data[i].features);
        truth_v[i] = data[i].airflow_mps;
      }
      return mse(pred, truth_v);
    };
    rows.push_back({cutoff, eval(train), eval(test)});
  }
  return rows;
}

void write_naive_csv(const std::string& path, const PredictionSeries& series) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IO_ERROR", "cannot open " + path + " for writing");
  f << "t_ms,vent_prob,airflow_naive\n";
  for (const auto& p : series.naive) {
    f << format_double(p.start_ms) << "," << format_double(p.vent_prob) << ","
      << format_double(p.airflow_mps) << "\n";
  }
  if (!f) throw Error("IO_ERROR", "write failed for " + path);
}

void write_batch_csv(const std::string& path, const PredictionSeries& series) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IO_ERROR", "cannot open " + path + " for writing");
  f << "batch,span_ms,airflow_mps\n";
  for (const auto& s : series.smoothed) {
    f << s.batch_index << "," << format_double(s.span_start_ms) << "-"
      << format_double(s.span_end_ms) << ",";
    if (s.outcome.failed()) {
      f << "FAIL";
    } else {
      f << format_double(*s.outcome.value);
    }
    f << "\n";
  }
  if (!f) throw Error("IO_ERROR", "write failed for " + path);
}

std::vector<NaivePrediction> read_naive_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("NOT_FOUND", "cannot open " + path);
  std::vector<NaivePrediction> out;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') ||
        !std::getline(ls, c))
      throw Error("MALFORMED_CSV", "bad prediction row in " + path);
    try {
      out.push_back({std::stod(a), std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw Error("MALFORMED_CSV", "bad numeric field in " + path);
    }
  }
  return out;
}

}  // namespace airsense
