#include "airsense/audio.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "airsense/error.hpp"

namespace airsense {

namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("NOT_FOUND", "cannot open " + path);

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error("CORRUPT_HEADER", path + " is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t pos = 12;
  AudioClip clip;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw Error("CORRUPT_HEADER", "truncated fmt chunk in " + path);
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt)
        throw Error("CORRUPT_HEADER", "data chunk before fmt in " + path);
      if (format != 1)
        throw Error("UNSUPPORTED_FORMAT", "non-PCM audio in " + path);
      if (channels != 1)
        throw Error("UNSUPPORTED_FORMAT", "expected mono, got " +
                                              std::to_string(channels) +
                                              " channels in " + path);
      if (bits != 16)
        throw Error("UNSUPPORTED_FORMAT",
                    "expected 16-bit samples, got " + std::to_string(bits) +
                        "-bit in " + path);
      if (body + chunk_size > bytes.size())
        throw Error("CORRUPT_HEADER",
                    "declared data length exceeds file size in " + path);
      clip.sample_rate = static_cast<int>(sample_rate);
      const size_t n = chunk_size / 2;
      clip.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const uint16_t raw = read_u16(bytes.data() + body + 2 * i);
        clip.samples[i] = static_cast<int16_t>(raw);
      }
      return clip;
    }
    // Chunks are word-aligned; skip the pad byte for odd sizes.
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw Error("CORRUPT_HEADER", "no data chunk found in " + path);
}

void write_wav(const std::string& path, const AudioClip& clip) {
  const uint32_t data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<uint32_t>(clip.sample_rate) * 2);  // byte rate
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits per sample
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (int16_t s : clip.samples) {
    put_u16(out, static_cast<uint16_t>(s));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("IO_ERROR", "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("IO_ERROR", "write failed for " + path);
}

std::vector<Frame> frames(const AudioClip& clip, int frame_len) {
  if (clip.sample_rate != kPipelineSampleRate) {
    throw Error("RATE_MISMATCH",
                "pipeline requires 16000 Hz, clip is " +
                    std::to_string(clip.sample_rate) + " Hz");
  }
  const size_t count = clip.samples.size() / static_cast<size_t>(frame_len);
  std::vector<Frame> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Frame f;
    f.index = i;
    f.samples.assign(clip.samples.begin() + i * frame_len,
                     clip.samples.begin() + (i + 1) * frame_len);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace airsense
