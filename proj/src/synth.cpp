#include "airsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "airsense/dsp.hpp"
#include "airsense/error.hpp"
#include "airsense/rng.hpp"

namespace airsense {

InterferenceSpec default_interference(InterferenceKind kind) {
  InterferenceSpec s;
  s.kind = kind;
  switch (kind) {
    case InterferenceKind::speech_band:
      s.band_lo_hz = 200.0;
      s.band_hi_hz = 3000.0;
      break;
    case InterferenceKind::broadband:
      s.band_lo_hz = 0.0;
      s.band_hi_hz = 7900.0;
      break;
    case InterferenceKind::low_hum:
      s.band_lo_hz = 40.0;
      s.band_hi_hz = 120.0;
      break;
  }
  return s;
}

namespace {

constexpr int kShapeTaps = 255;
constexpr double kFlowBandHz = 500.0;  // airflow noise lives below this

void validate(const SceneSpec& spec) {
  if (!(spec.duration_s >= 1.0))
    throw Error("INVALID_SPEC", "duration must be at least 1 s");
  if (spec.flow_profile.empty())
    throw Error("INVALID_SPEC", "flow profile is empty");
  if (spec.flow_profile.front().start_s != 0.0)
    throw Error("INVALID_SPEC", "first flow segment must start at 0");
  for (size_t i = 0; i < spec.flow_profile.size(); ++i) {
    const auto& seg = spec.flow_profile[i];
    if (seg.airflow_mps < 0.0)
      throw Error("INVALID_SPEC", "negative airflow rate");
    if (seg.start_s >= spec.duration_s)
      throw Error("INVALID_SPEC", "flow segment starts past scene end");
    if (i > 0 && seg.start_s <= spec.flow_profile[i - 1].start_s)
      throw Error("INVALID_SPEC", "flow segments out of order or overlapping");
  }
  for (const auto& intf : spec.interference) {
    if (!(intf.band_lo_hz >= 0.0) || !(intf.band_lo_hz < intf.band_hi_hz) ||
        intf.band_hi_hz >= kPipelineSampleRate / 2.0)
      throw Error("INVALID_SPEC", "interference band must satisfy 0 <= lo < hi < 8000");
    if (intf.rms_target < 0.0)
      throw Error("INVALID_SPEC", "negative interference RMS");
    if (intf.burst) {
      const auto& b = *intf.burst;
      if (!(b.on_min_s > 0.0) || b.on_max_s < b.on_min_s ||
          !(b.off_min_s > 0.0) || b.off_max_s < b.off_min_s)
        throw Error("INVALID_SPEC", "bad burst duration ranges");
    }
  }
  if (!(spec.gain_per_mps > 0.0))
    throw Error("INVALID_SPEC", "gain_per_mps must be positive");
}

std::vector<double> gaussian_noise(uint64_t seed, size_t n) {
  SplitMix64 rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = rng.next_gaussian();
  return out;
}

// Scales samples[lo, hi) in place to hit the target RMS exactly.
void normalize_segment(std::vector<double>& samples, size_t lo, size_t hi,
                       double target_rms) {
  if (lo >= hi) return;
  if (target_rms == 0.0) {
    std::fill(samples.begin() + lo, samples.begin() + hi, 0.0);
    return;
  }
  double acc = 0.0;
  for (size_t i = lo; i < hi; ++i) acc += samples[i] * samples[i];
  const double measured = std::sqrt(acc / static_cast<double>(hi - lo));
  if (measured == 0.0) return;
  const double scale = target_rms / measured;
  for (size_t i = lo; i < hi; ++i) samples[i] *= scale;
}

FilterKernel band_kernel(double lo_hz, double hi_hz) {
  FilterKernel hi = design_lowpass({hi_hz, kPipelineSampleRate, kShapeTaps});
  if (lo_hz <= 0.0) return hi;
  FilterKernel lo = design_lowpass({lo_hz, kPipelineSampleRate, kShapeTaps});
  for (size_t i = 0; i < hi.size(); ++i) hi[i] -= lo[i];
  return hi;
}

std::vector<double> flow_component(const SceneSpec& spec, uint64_t seed,
                                   size_t total) {
  std::vector<double> shaped;
  bool any_flow = false;
  for (const auto& seg : spec.flow_profile) any_flow |= seg.airflow_mps > 0.0;
  if (any_flow) {
    auto noise = gaussian_noise(seed, total);
    const FilterKernel kernel =
        design_lowpass({kFlowBandHz, kPipelineSampleRate, kShapeTaps});
    shaped = apply_filter(kernel, noise);
  } else {
    shaped.assign(total, 0.0);
  }
  for (size_t i = 0; i < spec.flow_profile.size(); ++i) {
    const auto& seg = spec.flow_profile[i];
    const size_t lo = static_cast<size_t>(seg.start_s * kPipelineSampleRate);
    const size_t hi =
        i + 1 < spec.flow_profile.size()
            ? static_cast<size_t>(spec.flow_profile[i + 1].start_s *
                                  kPipelineSampleRate)
            : total;
    const double target =
        spec.gain_per_mps * std::pow(seg.airflow_mps, 1.5);
    normalize_segment(shaped, lo, std::min(hi, total), target);
  }
  return shaped;
}

std::vector<double> interference_component(const InterferenceSpec& spec,
                                           uint64_t seed, size_t total) {
  SplitMix64 master(seed);
  const uint64_t noise_seed = master.next_u64();
  SplitMix64 sched(master.next_u64());

  auto noise = gaussian_noise(noise_seed, total);
  auto shaped = apply_filter(band_kernel(spec.band_lo_hz, spec.band_hi_hz),
                             noise);
  if (!spec.burst) {
    normalize_segment(shaped, 0, total, spec.rms_target);
    return shaped;
  }

  const auto& b = *spec.burst;
  size_t pos = 0;
  bool active = true;
  while (pos < total) {
    const double dur_s = active ? sched.next_uniform(b.on_min_s, b.on_max_s)
                                : sched.next_uniform(b.off_min_s, b.off_max_s);
    const size_t len = static_cast<size_t>(dur_s * kPipelineSampleRate);
    const size_t end = std::min(total, pos + std::max<size_t>(len, 1));
    normalize_segment(shaped, pos, end, active ? spec.rms_target : 0.0);
    pos = end;
    active = !active;
  }
  return shaped;
}

double flow_rate_at(const SceneSpec& spec, double t_s) {
  double rate = spec.flow_profile.front().airflow_mps;
  for (const auto& seg : spec.flow_profile) {
    if (seg.start_s <= t_s) rate = seg.airflow_mps;
  }
  return rate;
}

}  // namespace

std::pair<AudioClip, GroundTruth> synth_scene(const SceneSpec& spec) {
  validate(spec);
  const size_t total =
      static_cast<size_t>(spec.duration_s * kPipelineSampleRate);

  SplitMix64 master(spec.seed);
  const uint64_t flow_seed = master.next_u64();
  std::vector<uint64_t> intf_seeds;
  intf_seeds.reserve(spec.interference.size());
  for (size_t i = 0; i < spec.interference.size(); ++i) {
    intf_seeds.push_back(master.next_u64());
  }

  std::vector<double> mix = flow_component(spec, flow_seed, total);
  for (size_t i = 0; i < spec.interference.size(); ++i) {
    const auto comp =
        interference_component(spec.interference[i], intf_seeds[i], total);
    for (size_t j = 0; j < total; ++j) mix[j] += comp[j];
  }

  AudioClip clip;
  clip.sample_rate = kPipelineSampleRate;
  clip.samples.resize(total);
  for (size_t j = 0; j < total; ++j) {
    const double v = std::clamp(mix[j], -32768.0, 32767.0);
    clip.samples[j] = static_cast<int16_t>(std::llround(v));
  }

  GroundTruth truth;
  const size_t n_frames = total / kFrameLen;
  truth.entries.reserve(n_frames);
  for (size_t f = 0; f < n_frames; ++f) {
    const double t_s =
        static_cast<double>(f * kFrameLen) / kPipelineSampleRate;
    const double rate = flow_rate_at(spec, t_s);
    truth.entries.push_back({f, rate, rate > 0.0 ? 1 : 0});
  }
  return {std::move(clip), std::move(truth)};
}

namespace {

InterferenceKind parse_kind(const std::string& word) {
  if (word == "speech_band") return InterferenceKind::speech_band;
  if (word == "broadband") return InterferenceKind::broadband;
  if (word == "low_hum") return InterferenceKind::low_hum;
  throw Error("INVALID_SPEC", "unknown interference kind '" + word + "'");
}

std::string kind_name(InterferenceKind kind) {
  switch (kind) {
    case InterferenceKind::speech_band: return "speech_band";
    case InterferenceKind::broadband: return "broadband";
    case InterferenceKind::low_hum: return "low_hum";
  }
  return "speech_band";
}

}  // namespace

SceneSpec parse_scene_spec(const std::string& text) {
  SceneSpec spec;
  spec.flow_profile.clear();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const std::string where = " (line " + std::to_string(line_no) + ")";
    if (key == "duration_s") {
      if (!(ls >> spec.duration_s))
        throw Error("INVALID_SPEC", "bad duration_s" + where);
    } else if (key == "seed") {
      if (!(ls >> spec.seed)) throw Error("INVALID_SPEC", "bad seed" + where);
    } else if (key == "gain_per_mps") {
      if (!(ls >> spec.gain_per_mps))
        throw Error("INVALID_SPEC", "bad gain_per_mps" + where);
    } else if (key == "flow") {
      FlowSegment seg;
      if (!(ls >> seg.start_s >> seg.airflow_mps))
        throw Error("INVALID_SPEC", "flow needs <start_s> <mps>" + where);
      spec.flow_profile.push_back(seg);
    } else if (key == "interference") {
      std::string kind_word;
      if (!(ls >> kind_word))
        throw Error("INVALID_SPEC", "interference needs a kind" + where);
      InterferenceSpec intf = default_interference(parse_kind(kind_word));
      std::string opt;
      while (ls >> opt) {
        if (opt == "band") {
          if (!(ls >> intf.band_lo_hz >> intf.band_hi_hz))
            throw Error("INVALID_SPEC", "band needs <lo_hz> <hi_hz>" + where);
        } else if (opt == "rms") {
          if (!(ls >> intf.rms_target))
            throw Error("INVALID_SPEC", "rms needs a value" + where);
        } else if (opt == "burst") {
          BurstSchedule b;
          if (!(ls >> b.on_min_s >> b.on_max_s >> b.off_min_s >> b.off_max_s))
            throw Error("INVALID_SPEC",
                        "burst needs <on_min> <on_max> <off_min> <off_max>" +
                            where);
          intf.burst = b;
        } else {
          throw Error("INVALID_SPEC",
                      "unknown interference option '" + opt + "'" + where);
        }
      }
      spec.interference.push_back(intf);
    } else {
      throw Error("INVALID_SPEC", "unknown key '" + key + "'" + where);
    }
  }
  if (spec.flow_profile.empty()) {
    spec.flow_profile.push_back({0.0, 0.0});
  }
  return spec;
}

SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("NOT_FOUND", "cannot open scene spec " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return parse_scene_spec(text);
}

std::string format_scene_spec(const SceneSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "duration_s " << spec.duration_s << "\n";
  out << "seed " << spec.seed << "\n";
  out << "gain_per_mps " << spec.gain_per_mps << "\n";
  for (const auto& seg : spec.flow_profile) {
    out << "flow " << seg.start_s << " " << seg.airflow_mps << "\n";
  }
  for (const auto& intf : spec.interference) {
    out << "interference " << kind_name(intf.kind) << " band "
        << intf.band_lo_hz << " " << intf.band_hi_hz << " rms "
        << intf.rms_target;
    if (intf.burst) {
      out << " burst " << intf.burst->on_min_s << " " << intf.burst->on_max_s
          << " " << intf.burst->off_min_s << " " << intf.burst->off_max_s;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace airsense
