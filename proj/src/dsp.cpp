#include "airsense/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "airsense/error.hpp"

namespace airsense {

namespace {

constexpr double kPi = std::numbers::pi;

// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> to_double(std::span<const int16_t> s) {
  return std::vector<double>(s.begin(), s.end());
}

}  // namespace

int feature_count(double cutoff_hz) {
  return static_cast<int>(std::floor(cutoff_hz / kBinHz)) + 1;
}

double rms(std::span<const double> samples) {
  if (samples.empty()) throw Error("EMPTY_INPUT", "rms of empty sequence");
  double acc = 0.0;
  for (double x : samples) acc += x * x;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double rms(std::span<const int16_t> samples) {
  if (samples.empty()) throw Error("EMPTY_INPUT", "rms of empty sequence");
  double acc = 0.0;
  for (int16_t x : samples) {
    const double v = static_cast<double>(x);
    acc += v * v;
  }
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

FilterKernel design_lowpass(const FilterSpec& spec) {
  if (spec.taps < 3 || spec.taps % 2 == 0)
    throw Error("INVALID_SPEC", "taps must be odd and >= 3");
  if (!(spec.cutoff_hz > 0.0) ||
      !(spec.cutoff_hz < spec.sample_rate / 2.0))
    throw Error("INVALID_SPEC", "cutoff must lie in (0, nyquist)");

  const int n = spec.taps;
  const int mid = (n - 1) / 2;
  const double fc = spec.cutoff_hz / spec.sample_rate;  // normalized
  FilterKernel taps(n);
  for (int i = 0; i < n; ++i) {
    const int k = i - mid;
    const double sinc =
        k == 0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * k) / (kPi * k);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));  // Hamming
    taps[i] = sinc * window;
  }
  double sum = 0.0;
  for (double t : taps) sum += t;
  for (double& t : taps) t /= sum;
  return taps;
}

std::vector<double> apply_filter(const FilterKernel& kernel,
                                 std::span<const double> samples) {
  const int n = static_cast<int>(kernel.size());
  if (static_cast<int>(samples.size()) < n)
    throw Error("INPUT_TOO_SHORT", "need at least " + std::to_string(n) +
                                       " samples, got " +
                                       std::to_string(samples.size()));
  const int mid = (n - 1) / 2;
  const int len = static_cast<int>(samples.size());
  std::vector<double> out(samples.size(), 0.0);
  for (int i = 0; i < len; ++i) {
    double acc = 0.0;
    // y[i] = sum_k h[k] * x[i + mid - k]; out-of-range x treated as zero.
    const int k_lo = std::max(0, i + mid - (len - 1));
    const int k_hi = std::min(n - 1, i + mid);
    for (int k = k_lo; k <= k_hi; ++k) {
      acc += kernel[k] * samples[i + mid - k];
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> apply_filter(const FilterKernel& kernel,
                                 std::span<const int16_t> samples) {
  const auto d = to_double(samples);
  return apply_filter(kernel, d);
}

double kernel_response(const FilterKernel& kernel, double freq_hz,
                       int sample_rate) {
  const double w = 2.0 * kPi * freq_hz / sample_rate;
  std::complex<double> acc(0.0, 0.0);
  for (size_t k = 0; k < kernel.size(); ++k) {
    acc += kernel[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
  }
  return std::abs(acc);
}

Spectrum fft_magnitudes(std::span<const double> frame_samples) {
  if (frame_samples.size() != kFrameLen)
    throw Error("WRONG_FRAME_LENGTH",
                "expected 256 samples, got " +
                    std::to_string(frame_samples.size()));
  std::vector<std::complex<double>> a(kFrameLen);
  for (int i = 0; i < kFrameLen; ++i) a[i] = frame_samples[i];
  fft_inplace(a);

  Spectrum s;
  s.magnitudes.resize(kSpectrumBins);
  for (int k = 0; k < kSpectrumBins; ++k) {
    const double scale = (k == 0 || k == kFrameLen / 2) ? 1.0 : 2.0;
    s.magnitudes[k] = scale * std::abs(a[k]) / kFrameLen;
  }
  return s;
}

Spectrum fft_magnitudes(const Frame& frame) {
  std::vector<double> d(frame.samples.begin(), frame.samples.end());
  return fft_magnitudes(d);
}

namespace {

void check_cutoff(double cutoff_hz) {
  const double bins = cutoff_hz / kBinHz;
  const bool aligned = std::abs(bins - std::round(bins)) < 1e-9;
  if (!aligned || cutoff_hz < kBinHz || cutoff_hz > 500.0)
    throw Error("INVALID_CUTOFF",
                "cutoff must be a multiple of 62.5 in [62.5, 500], got " +
                    std::to_string(cutoff_hz));
}

}  // namespace

FeatureVector extract_features(std::span<const double> frame_samples,
                               double start_ms, double cutoff_hz) {
  check_cutoff(cutoff_hz);
  const Spectrum s = fft_magnitudes(frame_samples);
  const int count = feature_count(cutoff_hz);
  FeatureVector fv;
  fv.start_ms = start_ms;
  fv.values.assign(s.magnitudes.begin(), s.magnitudes.begin() + count);
  return fv;
}

FeatureVector extract_features(const Frame& frame, double cutoff_hz) {
  std::vector<double> d(frame.samples.begin(), frame.samples.end());
  return extract_features(d, frame.start_ms(), cutoff_hz);
}

double band_energy(std::span<const double> samples, double lo_hz, double hi_hz,
                   int sample_rate) {
  if (!(lo_hz < hi_hz) || hi_hz > sample_rate / 2.0)
    throw Error("INVALID_BAND", "need lo < hi <= nyquist");
  if (samples.empty()) return 0.0;

  const size_t n = next_pow2(samples.size());
  std::vector<std::complex<double>> a(n, 0.0);
  for (size_t i = 0; i < samples.size(); ++i) a[i] = samples[i];
  fft_inplace(a);

  // One-sided bins weighted so the full-band total equals sum(x^2).
  const double bin_hz = static_cast<double>(sample_rate) / n;
  double energy = 0.0;
  for (size_t k = 0; k <= n / 2; ++k) {
    const double f = k * bin_hz;
    if (f < lo_hz || f > hi_hz) continue;
    const double weight = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    energy += weight * std::norm(a[k]) / static_cast<double>(n);
  }
  return energy;
}

double band_energy(std::span<const int16_t> samples, double lo_hz,
                   double hi_hz, int sample_rate) {
  const auto d = to_double(samples);
  return band_energy(d, lo_hz, hi_hz, sample_rate);
}

}  // namespace airsense
