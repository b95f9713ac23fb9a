#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "airsense/audio.hpp"
#include "airsense/error.hpp"
#include "airsense/rng.hpp"

using namespace airsense;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("airsense_test_" + name);
}

AudioClip random_clip(SplitMix64& rng, size_t n, int rate = 16000) {
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (auto& s : c.samples) {
    s = static_cast<int16_t>(rng.next_u64() & 0xffff);
  }
  return c;
}

}  // namespace

TEST_CASE("wav round-trip of a one second clip") {
  SplitMix64 rng(7);
  AudioClip c = random_clip(rng, 16000);
  const auto path = temp_file("one_second.wav");
  write_wav(path.string(), c);
  const AudioClip back = read_wav(path.string());
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == 16000);
  CHECK(back.samples == c.samples);
  CHECK(fs::file_size(path) == 44 + 32000);
  fs::remove(path);
}

TEST_CASE("empty clip writes a valid 44-byte file") {
  AudioClip c;
  const auto path = temp_file("empty.wav");
  write_wav(path.string(), c);
  CHECK(fs::file_size(path) == 44);
  const AudioClip back = read_wav(path.string());
  CHECK(back.samples.empty());
  fs::remove(path);
}

TEST_CASE("read-write identity over 100 random clips") {
  SplitMix64 rng(99);
  const auto path = temp_file("roundtrip.wav");
  for (int i = 0; i < 100; ++i) {
    const size_t n = rng.next_u64() % 5000;
    AudioClip c = random_clip(rng, n);
    write_wav(path.string(), c);
    const AudioClip back = read_wav(path.string());
    REQUIRE(back.sample_rate == c.sample_rate);
    REQUIRE(back.samples == c.samples);
  }
  fs::remove(path);
}

TEST_CASE("8 kHz file reads fine but the pipeline rejects it") {
  SplitMix64 rng(3);
  AudioClip c = random_clip(rng, 800, 8000);
  const auto path = temp_file("slow.wav");
  write_wav(path.string(), c);
  const AudioClip back = read_wav(path.string());
  CHECK(back.sample_rate == 8000);
  CHECK_THROWS_WITH_AS(frames(back), doctest::Contains("RATE_MISMATCH"),
                       Error);
  fs::remove(path);
}

TEST_CASE("missing file") {
  CHECK_THROWS_WITH_AS(read_wav("/no/such/file.wav"),
                       doctest::Contains("NOT_FOUND"), Error);
}

TEST_CASE("reader tolerates extra chunks before data") {
  SplitMix64 rng(11);
  AudioClip c = random_clip(rng, 100);
  const auto path = temp_file("chunky.wav");
  write_wav(path.string(), c);

  // Splice a LIST chunk between fmt and data.
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  const std::string extra = std::string("LIST") +
                            std::string{4, 0, 0, 0} + "INFO";
  bytes.insert(36, extra);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();

  const AudioClip back = read_wav(path.string());
  CHECK(back.samples == c.samples);
  fs::remove(path);
}

TEST_CASE("rejects stereo, non-16-bit, non-PCM, truncated data") {
  SplitMix64 rng(12);
  AudioClip c = random_clip(rng, 64);
  const auto path = temp_file("mutated.wav");
  write_wav(path.string(), c);
  std::ifstream in(path, std::ios::binary);
  std::string good((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();

  auto write_mutated = [&](size_t offset, char value) {
    std::string bytes = good;
    bytes[offset] = value;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  };

  write_mutated(22, 2);  // channel count
  CHECK_THROWS_WITH_AS(read_wav(path.string()),
                       doctest::Contains("UNSUPPORTED_FORMAT"), Error);
  write_mutated(34, 8);  // bits per sample
  CHECK_THROWS_WITH_AS(read_wav(path.string()),
                       doctest::Contains("UNSUPPORTED_FORMAT"), Error);
  write_mutated(20, 3);  // format tag
  CHECK_THROWS_WITH_AS(read_wav(path.string()),
                       doctest::Contains("UNSUPPORTED_FORMAT"), Error);

  // Declared data length exceeds the file.
  std::string bytes = good;
  bytes[40] = static_cast<char>(0xff);
  bytes[41] = static_cast<char>(0xff);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  CHECK_THROWS_WITH_AS(read_wav(path.string()),
                       doctest::Contains("CORRUPT_HEADER"), Error);
  fs::remove(path);
}

TEST_CASE("framing arithmetic") {
  SplitMix64 rng(21);
  AudioClip c = random_clip(rng, 16000);
  const auto fr = frames(c);
  REQUIRE(fr.size() == 62);  // 128 samples dropped
  for (size_t i = 0; i < fr.size(); ++i) {
    CHECK(fr[i].index == i);
    CHECK(fr[i].start_ms() == doctest::Approx(i * 16.0));
    REQUIRE(fr[i].samples.size() == 256);
  }

  c.samples.resize(256);
  CHECK(frames(c).size() == 1);
  c.samples.resize(255);
  CHECK(frames(c).empty());
}

TEST_CASE("concatenated frames reproduce the clip prefix") {
  SplitMix64 rng(22);
  AudioClip c = random_clip(rng, 4000);
  const auto fr = frames(c);
  size_t pos = 0;
  for (const Frame& f : fr) {
    for (int16_t s : f.samples) {
      REQUIRE(s == c.samples[pos]);
      ++pos;
    }
  }
  CHECK(pos == fr.size() * 256);
}
