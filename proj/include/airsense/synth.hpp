#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airsense/audio.hpp"

namespace airsense {

enum class InterferenceKind { speech_band, broadband, low_hum };

struct BurstSchedule {
  double on_min_s = 0.5, on_max_s = 1.5;
  double off_min_s = 0.5, off_max_s = 1.5;
};

struct InterferenceSpec {
  InterferenceKind kind = InterferenceKind::speech_band;
  double band_lo_hz = 200.0;
  double band_hi_hz = 3000.0;
  double rms_target = 1000.0;  // PCM units while active
  std::optional<BurstSchedule> burst;  // nullopt = continuous
};

// Default band for a kind: speech_band (200,3000), broadband (0,7900),
// low_hum (40,120).
InterferenceSpec default_interference(InterferenceKind kind);

struct FlowSegment {
  double start_s = 0.0;
  double airflow_mps = 0.0;
};

struct SceneSpec {
  double duration_s = 10.0;
  std::vector<FlowSegment> flow_profile;  // ordered, first at 0
  std::vector<InterferenceSpec> interference;
  double gain_per_mps = 300.0;  // PCM units per (m/s)^1.5
  uint64_t seed = 1;
};

struct GroundTruthEntry {
  size_t frame_index = 0;
  double airflow_mps = 0.0;
  int vent_on = 0;
};

struct GroundTruth {
  std::vector<GroundTruthEntry> entries;
};

// Deterministic scene synthesis: low-pass-shaped Gaussian airflow noise with
// per-segment RMS = gain_per_mps * rate^1.5, plus band-limited interference,
// clipped to the 16-bit range. Throws INVALID_SPEC.
std::pair<AudioClip, GroundTruth> synth_scene(const SceneSpec& spec);

// Human-editable key/value scene config (see README for the grammar).
SceneSpec parse_scene_spec(const std::string& text);
SceneSpec load_scene_spec(const std::string& path);
std::string format_scene_spec(const SceneSpec& spec);

}  // namespace airsense
