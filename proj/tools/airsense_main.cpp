#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airsense/audio.hpp"
#include "airsense/csv.hpp"
#include "airsense/dsp.hpp"
#include "airsense/error.hpp"
#include "airsense/gbdt.hpp"
#include "airsense/metrics.hpp"
#include "airsense/mps.hpp"
#include "airsense/pipeline.hpp"
#include "airsense/silence.hpp"
#include "airsense/synth.hpp"

namespace {

using namespace airsense;

MpsParams parse_mps_flag(const std::string& text) {
  // Syntax: n=25,p=5,eps=0.5 (any subset, defaults fill the rest).
  MpsParams params;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error("INVALID_PARAMS", "bad --mps item '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      if (key == "n") params.n = std::stoi(val);
      else if (key == "p") params.p = std::stoi(val);
      else if (key == "eps") params.epsilon = std::stod(val);
      else throw Error("INVALID_PARAMS", "unknown --mps key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error("INVALID_PARAMS", "bad --mps value '" + val + "'");
    }
  }
  return params;
}

DutyCycle parse_duty_flag(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw Error("INVALID_PARAMS", "--duty expects sense_s,interval_s");
  try {
    DutyCycle d{std::stod(text.substr(0, comma)),
                std::stod(text.substr(comma + 1))};
    if (!(d.sense_s > 0.0) || d.sense_s > d.interval_s)
      throw Error("INVALID_PARAMS", "need 0 < sense_s <= interval_s");
    return d;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error("INVALID_PARAMS", "bad --duty value '" + text + "'");
  }
}

std::vector<double> parse_cutoff_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error("INVALID_PARAMS", "bad cutoff '" + item + "'");
    }
  }
  if (out.empty()) throw Error("INVALID_PARAMS", "empty cutoff list");
  return out;
}

std::string batch_csv_path(const std::string& naive_path) {
  const auto dot = naive_path.rfind('.');
  if (dot == std::string::npos) return naive_path + ".mps";
  return naive_path.substr(0, dot) + ".mps" + naive_path.substr(dot);
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

struct CommonOpts {
  std::string in, out, labels, spec_path, model, model_r, model_c, features;
  std::string task = "regress";
  std::string mps_text, duty_text, cutoff_text;
  double cutoff = kDefaultCutoffHz;
  double silence_threshold = 60.0;
  double split_hz = 400.0;
  bool no_mps = false;
  std::optional<uint64_t> seed;
  HyperParams hp;
};

int cmd_synth(const CommonOpts& o) {
  SceneSpec spec = load_scene_spec(o.spec_path);
  if (o.seed) spec.seed = *o.seed;
  std::cout << "config: synth spec=" << o.spec_path << " out=" << o.out
            << " seed=" << spec.seed << " duration_s=" << spec.duration_s
            << "\n";
  auto [clip, truth] = synth_scene(spec);
  write_wav(o.out, clip);
  if (!o.labels.empty()) write_label_csv(o.labels, truth);
  std::cout << "wrote " << o.out << " (" << clip.samples.size()
            << " samples), " << truth.entries.size() << " labeled frames\n";
  return 0;
}

int cmd_features(const CommonOpts& o) {
  std::cout << "config: features in=" << o.in << " out=" << o.out
            << " cutoff=" << o.cutoff << "\n";
  const AudioClip clip = read_wav(o.in);
  std::vector<FeatureRow> rows;
  if (!o.labels.empty()) {
    const GroundTruth truth = read_label_csv(o.labels);
    const auto samples = build_dataset(clip, truth, o.cutoff);
    rows = dataset_to_rows(samples);
  } else {
    GroundTruth dummy;
    const size_t n = clip.samples.size() / kFrameLen;
    for (size_t i = 0; i < n; ++i) dummy.entries.push_back({i, 0.0, 0});
    const auto samples = build_dataset(clip, dummy, o.cutoff);
    rows = dataset_to_rows(samples);
    for (auto& r : rows) {
      r.airflow_mps.reset();
      r.vent_on.reset();
    }
  }
  write_feature_csv(o.out, rows);
  std::cout << "wrote " << rows.size() << " feature rows to " << o.out << "\n";
  return 0;
}

int cmd_train(const CommonOpts& o) {
  std::cout << "config: train task=" << o.task << " features=" << o.features
            << " model=" << o.model << " cutoff=" << o.cutoff
            << " trees=" << o.hp.n_trees << " depth=" << o.hp.max_depth
            << " min-split=" << o.hp.min_samples_split << " lr="
            << o.hp.learning_rate << "\n";
  const auto rows = read_feature_csv(o.features);
  const auto samples = rows_to_dataset(rows);
  if (!samples.empty() &&
      static_cast<int>(samples.front().features.size()) !=
          feature_count(o.cutoff))
    throw Error("FEATURE_LENGTH_MISMATCH",
                "feature CSV width does not match cutoff " +
                    format_double(o.cutoff));
  const GbdtModel model = fit(parse_task(o.task), samples, o.hp, o.cutoff);
  save_model(model, o.model);
  std::cout << "trained " << model.trees.size() << " trees on "
            << samples.size() << " samples -> " << o.model << "\n";
  return 0;
}

int cmd_predict(const CommonOpts& o) {
  PipelineConfig cfg;
  cfg.silence.threshold_rms = o.silence_threshold;
  if (o.no_mps) {
    cfg.mps.reset();
  } else if (!o.mps_text.empty()) {
    cfg.mps = parse_mps_flag(o.mps_text);
  }
  if (!o.duty_text.empty()) cfg.duty = parse_duty_flag(o.duty_text);

  const GbdtModel regressor = load_model(o.model_r);
  const GbdtModel classifier = load_model(o.model_c);
  cfg.cutoff_hz = regressor.cutoff_hz;

  std::cout << "config: predict in=" << o.in << " out=" << o.out
            << " model-r=" << o.model_r << " model-c=" << o.model_c
            << " cutoff=" << cfg.cutoff_hz
            << " silence-threshold=" << cfg.silence.threshold_rms;
  if (cfg.mps) {
    std::cout << " mps=n=" << cfg.mps->n << ",p=" << cfg.mps->p
              << ",eps=" << cfg.mps->epsilon;
  } else {
    std::cout << " mps=off";
  }
  if (cfg.duty) {
    std::cout << " duty=" << cfg.duty->sense_s << "," << cfg.duty->interval_s;
  }
  std::cout << "\n";

  const AudioClip clip = read_wav(o.in);
  const PredictionSeries series = process_clip(clip, cfg, classifier, regressor);
  write_naive_csv(o.out, series);
  std::cout << "frames total=" << series.stats.total
            << " duty_skipped=" << series.stats.duty_skipped
            << " gated_out=" << series.stats.gated_out
            << " processed=" << series.stats.processed << "\n";
  std::cout << "wrote " << series.naive.size() << " naive predictions to "
            << o.out << "\n";
  if (cfg.mps) {
    const std::string batches = batch_csv_path(o.out);
    write_batch_csv(batches, series);
    std::cout << "wrote " << series.smoothed.size() << " MPS batches to "
              << batches << "\n";
  }
  return 0;
}

int cmd_eval(const CommonOpts& o) {
  std::cout << "config: eval task=" << o.task << " in=" << o.in
            << " labels=" << o.labels << "\n";
  const auto preds = read_naive_csv(o.in);
  const GroundTruth truth = read_label_csv(o.labels);
  if (preds.empty()) throw Error("EMPTY_INPUT", "no predictions in " + o.in);

  // Join on frame timestamps.
  std::vector<double> pred_flow, truth_flow;
  std::vector<int> pred_vent, truth_vent;
  for (const auto& p : preds) {
    const size_t frame = static_cast<size_t>(std::llround(p.start_ms / 16.0));
    if (frame >= truth.entries.size())
      throw Error("LENGTH_MISMATCH", "prediction beyond labeled range");
    pred_flow.push_back(p.airflow_mps);
    truth_flow.push_back(truth.entries[frame].airflow_mps);
    pred_vent.push_back(p.vent_prob >= 0.5 ? 1 : 0);
    truth_vent.push_back(truth.entries[frame].vent_on);
  }

  std::ostringstream csv_out;
  if (o.task == "classify") {
    const auto r = classification_report(pred_vent, truth_vent);
    std::printf("accuracy  %.4f\nprecision %.4f%s\nrecall    %.4f%s\nf1        %.4f%s\n",
                r.accuracy, r.precision,
                r.degenerate_precision ? " (degenerate)" : "", r.recall,
                r.degenerate_recall ? " (degenerate)" : "", r.f1,
                r.degenerate_f1 ? " (degenerate)" : "");
    std::printf("confusion tp=%zu fp=%zu fn=%zu tn=%zu\n", r.tp, r.fp, r.fn,
                r.tn);
    csv_out << "metric,value\naccuracy," << format_double(r.accuracy)
            << "\nprecision," << format_double(r.precision) << "\nrecall,"
            << format_double(r.recall) << "\nf1," << format_double(r.f1)
            << "\n";
  } else {
    const double m = mse(pred_flow, truth_flow);
    std::printf("mse %.6f\n", m);
    csv_out << "metric,value\nmse," << format_double(m) << "\n";
    try {
      const double r = r2(pred_flow, truth_flow);
      std::printf("r2  %.6f\n", r);
      csv_out << "r2," << format_double(r) << "\n";
    } catch (const Error& e) {
      if (e.code() != "ZERO_VARIANCE") throw;
      std::printf("r2  undefined (truth has zero variance)\n");
    }
  }
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("IO_ERROR", "cannot open " + o.out + " for writing");
    f << csv_out.str();
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  const std::vector<double> cutoffs =
      o.cutoff_text.empty()
          ? std::vector<double>{62.5, 125, 187.5, 250, 312.5, 375, 437.5, 500}
          : parse_cutoff_list(o.cutoff_text);
  std::cout << "config: sweep in=" << o.in << " labels=" << o.labels
            << " out=" << o.out << " trees=" << o.hp.n_trees
            << " cutoffs=";
  for (size_t i = 0; i < cutoffs.size(); ++i)
    std::cout << (i ? "," : "") << cutoffs[i];
  std::cout << "\n";

  const AudioClip clip = read_wav(o.in);
  const GroundTruth truth = read_label_csv(o.labels);

  // 80/20 frame split: first 80% trains, the rest tests.
  const size_t n_frames =
      std::min(clip.samples.size() / kFrameLen, truth.entries.size());
  const size_t split = n_frames * 8 / 10;
  AudioClip train_clip{clip.sample_rate,
                       {clip.samples.begin(),
                        clip.samples.begin() + split * kFrameLen}};
  AudioClip test_clip{clip.sample_rate,
                      {clip.samples.begin() + split * kFrameLen,
                       clip.samples.begin() + n_frames * kFrameLen}};
  GroundTruth train_truth, test_truth;
  for (size_t i = 0; i < split; ++i)
    train_truth.entries.push_back(truth.entries[i]);
  for (size_t i = split; i < n_frames; ++i) {
    auto e = truth.entries[i];
    e.frame_index -= split;
    test_truth.entries.push_back(e);
  }

  // One task per cutoff; results keep input order.
  std::vector<std::future<SweepRow>> futures;
  for (double cutoff : cutoffs) {
    futures.push_back(std::async(std::launch::async, [&, cutoff] {
      const double one[] = {cutoff};
      return sweep_cutoff(train_clip, train_truth, test_clip, test_truth, one,
                          o.hp)[0];
    }));
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IO_ERROR", "cannot open " + o.out + " for writing");
  f << "cutoff_hz,train_mse,test_mse\n";
  for (auto& fut : futures) {
    const SweepRow row = fut.get();
    f << format_double(row.cutoff_hz) << "," << format_double(row.train_mse)
      << "," << format_double(row.test_mse) << "\n";
    std::printf("cutoff %7.1f Hz  train_mse %.6f  test_mse %.6f\n",
                row.cutoff_hz, row.train_mse, row.test_mse);
  }
  return 0;
}

int cmd_privacy(const CommonOpts& o) {
  std::cout << "config: privacy in=" << o.in << " out=" << o.out
            << " cutoff=" << o.cutoff << " split-hz=" << o.split_hz << "\n";
  const AudioClip clip = read_wav(o.in);
  if (clip.sample_rate != kPipelineSampleRate)
    throw Error("RATE_MISMATCH", "privacy filter expects 16 kHz input");

  const FilterKernel kernel =
      design_lowpass({o.cutoff, kPipelineSampleRate, 255});
  const auto filtered =
      apply_filter(kernel, std::span<const int16_t>(clip.samples));
  AudioClip out_clip;
  out_clip.sample_rate = clip.sample_rate;
  out_clip.samples.resize(filtered.size());
  for (size_t i = 0; i < filtered.size(); ++i) {
    out_clip.samples[i] = static_cast<int16_t>(
        std::llround(std::clamp(filtered[i], -32768.0, 32767.0)));
  }
  write_wav(o.out, out_clip);

  const double nyquist = kPipelineSampleRate / 2.0;
  const std::span<const int16_t> before(clip.samples);
  const std::span<const int16_t> after(out_clip.samples);
  const double below_before = band_energy(before, 0.0, o.split_hz);
  const double below_after = band_energy(after, 0.0, o.split_hz);
  const double above_before = band_energy(before, o.split_hz, nyquist);
  const double above_after = band_energy(after, o.split_hz, nyquist);

  std::printf("band energy below %.1f Hz: before %.6g, after %.6g\n",
              o.split_hz, below_before, below_after);
  std::printf("band energy above %.1f Hz: before %.6g, after %.6g\n",
              o.split_hz, above_before, above_after);
  if (above_after > 0.0 && above_before > 0.0) {
    std::printf("attenuation above split: %.2f dB\n",
                to_db(above_before / above_after));
  } else {
    std::printf("attenuation above split: inf dB\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acoustic vent sensing: synthesis, features, models, prediction"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  synth->add_option("--spec", o.spec_path, "scene config file")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", o.out, "output WAV path")->required();
  synth->add_option("--labels", o.labels, "output label CSV path");
  uint64_t seed_value = 0;
  auto* seed_opt = synth->add_option("--seed", seed_value, "override scene seed");

  auto* features = app.add_subcommand("features", "extract FFT features");
  features->add_option("--in", o.in, "input WAV")->required()
      ->check(CLI::ExistingFile);
  features->add_option("--labels", o.labels, "label CSV to join")
      ->check(CLI::ExistingFile);
  features->add_option("--out", o.out, "output feature CSV")->required();
  features->add_option("--cutoff", o.cutoff, "low-pass cutoff in Hz");

  auto* train = app.add_subcommand("train", "train a model from features");
  train->add_option("--task", o.task, "classify or regress")
      ->required()
      ->check(CLI::IsMember({"classify", "regress"}));
  train->add_option("--features", o.features, "labeled feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--model", o.model, "output model JSON")->required();
  train->add_option("--cutoff", o.cutoff, "cutoff metadata in Hz");
  train->add_option("--trees", o.hp.n_trees, "number of trees");
  train->add_option("--depth", o.hp.max_depth, "max tree depth");
  train->add_option("--min-split", o.hp.min_samples_split,
                    "min samples to split");
  train->add_option("--lr", o.hp.learning_rate, "learning rate");

  auto* predict = app.add_subcommand("predict", "run the full pipeline");
  predict->add_option("--model-r", o.model_r, "regressor JSON")->required();
  predict->add_option("--model-c", o.model_c, "classifier JSON")->required();
  predict->add_option("--in", o.in, "input WAV")->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--out", o.out, "output prediction CSV")->required();
  predict->add_option("--silence-threshold", o.silence_threshold,
                      "RMS silence threshold");
  predict->add_option("--mps", o.mps_text, "MPS params n=..,p=..,eps=..");
  predict->add_flag("--no-mps", o.no_mps, "disable MPS post-processing");
  predict->add_option("--duty", o.duty_text, "duty cycle sense_s,interval_s");

  auto* eval = app.add_subcommand("eval", "score predictions against labels");
  eval->add_option("--task", o.task, "classify or regress")
      ->required()
      ->check(CLI::IsMember({"classify", "regress"}));
  eval->add_option("--in", o.in, "prediction CSV")->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--labels", o.labels, "label CSV")->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", o.out, "optional report CSV");

  auto* sweep = app.add_subcommand("sweep", "cutoff frequency sweep");
  sweep->add_option("--in", o.in, "input WAV")->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--labels", o.labels, "label CSV")->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", o.out, "output sweep CSV")->required();
  sweep->add_option("--cutoff", o.cutoff_text,
                    "comma-separated cutoffs in Hz (default all 8)");
  sweep->add_option("--trees", o.hp.n_trees, "number of trees");
  sweep->add_option("--depth", o.hp.max_depth, "max tree depth");
  sweep->add_option("--min-split", o.hp.min_samples_split,
                    "min samples to split");
  sweep->add_option("--lr", o.hp.learning_rate, "learning rate");

  auto* privacy = app.add_subcommand("privacy",
                                     "write low-pass-filtered WAV and report "
                                     "band attenuation");
  privacy->add_option("--in", o.in, "input WAV")->required()
      ->check(CLI::ExistingFile);
  privacy->add_option("--out", o.out, "output filtered WAV")->required();
  privacy->add_option("--cutoff", o.cutoff, "low-pass cutoff in Hz");
  privacy->add_option("--split-hz", o.split_hz, "report split frequency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (seed_opt->count() > 0) o.seed = seed_value;

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (features->parsed()) return cmd_features(o);
    if (train->parsed()) return cmd_train(o);
    if (predict->parsed()) return cmd_predict(o);
    if (eval->parsed()) return cmd_eval(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (privacy->parsed()) return cmd_privacy(o);
  } catch (const airsense::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
