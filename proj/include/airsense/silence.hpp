#pragma once

#include "airsense/audio.hpp"
#include "airsense/dsp.hpp"

namespace airsense {

struct SilenceConfig {
  double threshold_rms = 60.0;  // raw 16-bit PCM amplitude units
};

// True iff the frame RMS is at or below the threshold; only silent frames
// are analyzed by the pipeline. Boundary counts as silent.
inline bool is_silent(const Frame& frame, const SilenceConfig& cfg) {
  return rms(std::span<const int16_t>(frame.samples)) <= cfg.threshold_rms;
}

}  // namespace airsense
