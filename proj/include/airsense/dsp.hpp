#pragma once

#include <span>
#include <vector>

#include "airsense/audio.hpp"

namespace airsense {

inline constexpr double kBinHz = 62.5;  // 16000 / 256
inline constexpr int kSpectrumBins = 129;
inline constexpr double kDefaultCutoffHz = 375.0;

struct FilterSpec {
  double cutoff_hz = kDefaultCutoffHz;
  int sample_rate = kPipelineSampleRate;
  int taps = 255;  // odd; group delay (taps-1)/2
};

// Symmetric FIR coefficients, unity DC gain.
using FilterKernel = std::vector<double>;

// 129 magnitudes for bins 0..128, bin k at k*62.5 Hz. Normalized so an
// exact-bin sinusoid of amplitude A reports A.
struct Spectrum {
  std::vector<double> magnitudes;
};

// Magnitudes of the bins at and below the cutoff, with the frame timestamp.
struct FeatureVector {
  double start_ms = 0.0;
  std::vector<double> values;
};

// Number of feature bins for a cutoff: floor(cutoff/62.5) + 1.
int feature_count(double cutoff_hz);

// sqrt(mean(x^2)). Throws EMPTY_INPUT.
double rms(std::span<const int16_t> samples);
double rms(std::span<const double> samples);

// Hamming windowed-sinc low-pass, normalized to unity DC gain.
FilterKernel design_lowpass(const FilterSpec& spec);

// Direct-form convolution with zero-padded edges, delay-compensated by
// (taps-1)/2 so output aligns with the input timeline. Same length as input.
std::vector<double> apply_filter(const FilterKernel& kernel,
                                 std::span<const double> samples);
std::vector<double> apply_filter(const FilterKernel& kernel,
                                 std::span<const int16_t> samples);

// Magnitude of the kernel's frequency response at freq_hz.
double kernel_response(const FilterKernel& kernel, double freq_hz,
                       int sample_rate = kPipelineSampleRate);

// Radix-2 256-point FFT magnitudes; mag[0]=|X0|/256, mag[128]=|X128|/256,
// else 2|Xk|/256. Throws WRONG_FRAME_LENGTH unless exactly 256 samples.
Spectrum fft_magnitudes(std::span<const double> frame_samples);
Spectrum fft_magnitudes(const Frame& frame);

// First feature_count(cutoff) magnitudes. Cutoff must be a multiple of
// 62.5 in [62.5, 500] (INVALID_CUTOFF otherwise).
FeatureVector extract_features(const Frame& frame,
                               double cutoff_hz = kDefaultCutoffHz);
FeatureVector extract_features(std::span<const double> frame_samples,
                               double start_ms,
                               double cutoff_hz = kDefaultCutoffHz);

// Sum of squared spectral magnitudes over [lo_hz, hi_hz], normalized so the
// total over [0, nyquist] equals the time-domain sample energy (Parseval).
double band_energy(std::span<const double> samples, double lo_hz, double hi_hz,
                   int sample_rate = kPipelineSampleRate);
double band_energy(std::span<const int16_t> samples, double lo_hz,
                   double hi_hz, int sample_rate = kPipelineSampleRate);

}  // namespace airsense
