#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace airsense {

inline constexpr int kPipelineSampleRate = 16000;
inline constexpr int kFrameLen = 256;

// Mono 16-bit PCM audio. Immutable by convention after construction.
struct AudioClip {
  int sample_rate = kPipelineSampleRate;
  std::vector<int16_t> samples;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// One fixed-length analysis window (16 ms at 16 kHz).
struct Frame {
  size_t index = 0;
  std::vector<int16_t> samples;  // exactly kFrameLen entries

  double start_ms() const { return index * 16.0; }
};

// Reads a RIFF/WAVE PCM 16-bit mono file. Tolerates extra chunks before
// `data`. Throws NOT_FOUND, UNSUPPORTED_FORMAT, CORRUPT_HEADER.
AudioClip read_wav(const std::string& path);

// Writes the minimal canonical 44-byte header plus little-endian samples.
void write_wav(const std::string& path, const AudioClip& clip);

// Non-overlapping contiguous frames; trailing remainder samples dropped.
// Requires clip.sample_rate == 16000 (RATE_MISMATCH otherwise).
std::vector<Frame> frames(const AudioClip& clip, int frame_len = kFrameLen);

}  // namespace airsense
