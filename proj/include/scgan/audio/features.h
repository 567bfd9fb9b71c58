#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scgan/audio/wav.h"
#include "scgan/nn/tensor.h"

namespace scgan::audio {

struct FrameParams {
  std::size_t frame_length = 400;  // 25 ms at 16 kHz
  std::size_t hop = 160;           // 10 ms
  std::size_t fft_size = 512;
  std::size_t mel_bands = 26;
  std::size_t mfcc_count = 14;
  double log_floor = 1e-10;
};

/// T frames x d LLD values.
struct FrameSequence {
  nn::Matrix frames;
  std::size_t frame_length = 0;
  std::size_t hop = 0;
  std::uint32_t sample_rate = 16000;

  std::size_t length() const { return frames.rows(); }
  std::size_t dim() const { return frames.cols(); }
};

/// Base LLDs per frame, in this order:
///   rms, zcr (crossings per second), spectral centroid (Hz), spectral flux,
///   roll-off 25/50/75/90 % (Hz), spectral variance, skewness, kurtosis,
///   mfcc 1..14.
/// extract_llds appends the first-order delta of each, giving 50 columns.
inline constexpr std::size_t kBaseLlds = 25;
inline constexpr std::size_t kLlds = 2 * kBaseLlds;
std::vector<std::string> lld_names();

/// Hann-windowed frames, power spectra via FFTW; throws ValidationError if
/// the clip is shorter than one frame or not 16 kHz.
FrameSequence extract_llds(const AudioClip& clip, const FrameParams& params = {});

/// Base LLDs only (no deltas).
nn::Matrix base_llds(const AudioClip& clip, const FrameParams& params = {});

/// Width-2 regression deltas, edges clamped: sum_n n (c[t+n] - c[t-n]) / 10.
nn::Matrix deltas(const nn::Matrix& contours);

/// Triangular mel filterbank over 0..sample_rate/2, each band normalized to
/// unit area. Rows are bands, columns FFT bins 0..fft_size/2.
nn::Matrix mel_filterbank(std::size_t bands, std::size_t fft_size, double sample_rate);

// ---------------------------------------------------------- functionals

/// Functionals per LLD contour, in this order.
inline constexpr std::size_t kFunctionals = 12;
std::vector<std::string> functional_names();

/// mean, std, min, max, range, skewness, kurtosis, q1, q2, q3, slope, mse.
/// Moments are population moments; skewness and kurtosis are 0 for a
/// constant contour. Quartiles interpolate linearly at p (n - 1).
std::vector<double> contour_functionals(std::span<const double> contour);

/// 12 functionals per column, column-major (all 12 of column 0 first).
std::vector<double> functionals(const FrameSequence& seq);
std::vector<double> functionals(const nn::Matrix& contours);

/// Linear-interpolation percentile of sorted data, p in [0, 1].
double percentile_sorted(const std::vector<double>& sorted, double p);

// ------------------------------------------------------------ windowing

struct WindowedSequence {
  std::vector<nn::Matrix> windows;
  bool padded = false;  // the input was shorter than one window
};

/// Fixed windows of `window` frames every `step` frames; a trailing partial
/// window is dropped. A shorter input gives one zero-padded window.
WindowedSequence window_sequence(const nn::Matrix& seq, std::size_t window = 40,
                                 std::size_t step = 10);

}  // namespace scgan::audio
