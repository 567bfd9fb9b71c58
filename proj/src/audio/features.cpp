#include "scgan/audio/features.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "scgan/error.h"

namespace scgan::audio {

namespace {

// Plan creation in FFTW is not thread-safe; execution with new arrays is.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(plan_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  /// |X_k|^2 for k = 0..n/2 of the zero-padded input.
  void power(std::span<const double> x, std::vector<double>& out) {
    std::fill(in_, in_ + n_, 0.0);
    std::copy(x.begin(), x.end(), in_);
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  static std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
  }
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

std::vector<std::string> lld_names() {
  std::vector<std::string> base{"rms",          "zcr",          "spectral_centroid",
                                "spectral_flux", "rolloff25",   "rolloff50",
                                "rolloff75",    "rolloff90",    "spectral_variance",
                                "spectral_skewness", "spectral_kurtosis"};
  for (int i = 1; i <= 14; ++i) base.push_back("mfcc" + std::to_string(i));
  auto all = base;
  for (const auto& n : base) all.push_back(n + "_delta");
  return all;
}

nn::Matrix mel_filterbank(std::size_t bands, std::size_t fft_size, double sample_rate) {
  const std::size_t bins = fft_size / 2 + 1;
  nn::Matrix fb(bands, bins);
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_hi * static_cast<double>(i) / static_cast<double>(bands + 1));
  }
  for (std::size_t b = 0; b < bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    double area = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fb(b, k) = w;
      area += w;
    }
    if (area > 0.0) {
      for (std::size_t k = 0; k < bins; ++k) fb(b, k) /= area;
    }
  }
  return fb;
}

nn::Matrix base_llds(const AudioClip& clip, const FrameParams& p) {
  clip.validate();
  if (clip.sample_rate != 16000) {
    throw ValidationError("extract_llds: expected 16 kHz audio, got " +
                          std::to_string(clip.sample_rate) + " Hz");
  }
  const std::size_t n = clip.samples.size();
  if (n < p.frame_length) {
    throw ValidationError("extract_llds: clip shorter than one frame (" + std::to_string(n) +
                          " < " + std::to_string(p.frame_length) + " samples)");
  }
  if (p.fft_size < p.frame_length) throw ValidationError("extract_llds: fft_size < frame length");
  const std::size_t frames = 1 + (n - p.frame_length) / p.hop;
  const std::size_t bins = p.fft_size / 2 + 1;
  const double sr = static_cast<double>(clip.sample_rate);

  std::vector<double> window(p.frame_length);
  for (std::size_t i = 0; i < p.frame_length; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(p.frame_length - 1));
  }
  std::vector<double> freq(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    freq[k] = static_cast<double>(k) * sr / static_cast<double>(p.fft_size);
  }
  const nn::Matrix fb = mel_filterbank(p.mel_bands, p.fft_size, sr);

  nn::Matrix out(frames, kBaseLlds);
  RealFft fft(p.fft_size);
  std::vector<double> buf(p.frame_length), pw, mag, prev_mag(bins, 0.0), logmel(p.mel_bands);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* x = clip.samples.data() + t * p.hop;
    auto row = out.row(t);

    double e = 0.0;
    std::size_t crossings = 0;
    for (std::size_t i = 0; i < p.frame_length; ++i) {
      e += x[i] * x[i];
      if (i > 0 && ((x[i - 1] >= 0.0) != (x[i] >= 0.0))) ++crossings;
      buf[i] = x[i] * window[i];
    }
    row[0] = std::sqrt(e / static_cast<double>(p.frame_length));
    row[1] = static_cast<double>(crossings) * sr / static_cast<double>(p.frame_length);

    fft.power(buf, pw);
    mag.resize(bins);
    double total = 0.0, flux = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      mag[k] = std::sqrt(pw[k]);
      total += pw[k];
      if (t > 0) flux += (mag[k] - prev_mag[k]) * (mag[k] - prev_mag[k]);
    }
    prev_mag = mag;
    row[3] = std::sqrt(flux);

    if (total > 0.0) {
      double c = 0.0;
      for (std::size_t k = 0; k < bins; ++k) c += freq[k] * pw[k];
      c /= total;
      double m2 = 0.0, m3 = 0.0, m4 = 0.0;
      for (std::size_t k = 0; k < bins; ++k) {
        const double d = freq[k] - c, w = pw[k] / total;
        m2 += d * d * w;
        m3 += d * d * d * w;
        m4 += d * d * d * d * w;
      }
      row[2] = c;
      const double fractions[4] = {0.25, 0.5, 0.75, 0.9};
      for (int r = 0; r < 4; ++r) {
        double cum = 0.0;
        std::size_t k = 0;
        for (; k < bins; ++k) {
          cum += pw[k];
          if (cum >= fractions[r] * total) break;
        }
        row[4 + r] = freq[std::min(k, bins - 1)];
      }
      row[8] = m2;
      row[9] = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
      row[10] = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    }

    for (std::size_t b = 0; b < p.mel_bands; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < bins; ++k) s += fb(b, k) * pw[k];
      logmel[b] = std::log(std::max(s, p.log_floor));
    }
    const double scale = std::sqrt(2.0 / static_cast<double>(p.mel_bands));
    for (std::size_t c = 1; c <= p.mfcc_count; ++c) {
      double s = 0.0;
      for (std::size_t b = 0; b < p.mel_bands; ++b) {
        s += logmel[b] * std::cos(std::numbers::pi * static_cast<double>(c) *
                                  (static_cast<double>(b) + 0.5) /
                                  static_cast<double>(p.mel_bands));
      }
      row[11 + c - 1] = scale * s;
    }
  }
  return out;
}

nn::Matrix deltas(const nn::Matrix& c) {
  const std::size_t T = c.rows();
  nn::Matrix d(T, c.cols());
  if (T == 0) return d;
  auto at = [&](long t, std::size_t j) {
    const long clamped = std::clamp<long>(t, 0, static_cast<long>(T) - 1);
    return c(static_cast<std::size_t>(clamped), j);
  };
  for (std::size_t t = 0; t < T; ++t) {
    const long lt = static_cast<long>(t);
    for (std::size_t j = 0; j < c.cols(); ++j) {
      d(t, j) = ((at(lt + 1, j) - at(lt - 1, j)) + 2.0 * (at(lt + 2, j) - at(lt - 2, j))) / 10.0;
    }
  }
  return d;
}

FrameSequence extract_llds(const AudioClip& clip, const FrameParams& p) {
  const nn::Matrix base = base_llds(clip, p);
  const nn::Matrix d = deltas(base);
  FrameSequence seq;
  seq.frames = nn::Matrix(base.rows(), 2 * base.cols());
  for (std::size_t t = 0; t < base.rows(); ++t) {
    std::copy(base.row(t).begin(), base.row(t).end(), seq.frames.row(t).begin());
    std::copy(d.row(t).begin(), d.row(t).end(), seq.frames.row(t).begin() + static_cast<std::ptrdiff_t>(base.cols()));
  }
  seq.frame_length = p.frame_length;
  seq.hop = p.hop;
  seq.sample_rate = clip.sample_rate;
  return seq;
}

std::vector<std::string> functional_names() {
  return {"mean", "std", "min", "max", "range", "skewness", "kurtosis",
          "q1",   "q2",  "q3",  "slope", "mse"};
}

double percentile_sorted(const std::vector<double>& s, double p) {
  if (s.empty()) throw ValidationError("percentile of empty data");
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

std::vector<double> contour_functionals(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw ValidationError("functionals: contour needs at least 2 frames");
  const double nd = static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= nd;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= nd;
  m3 /= nd;
  m4 /= nd;
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  // Least squares against t = 0..n-1.
  const double tmean = (nd - 1.0) / 2.0;
  double stt = 0.0, sty = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - tmean;
    stt += dt * dt;
    sty += dt * (x[t] - mean);
  }
  const double slope = sty / stt;
  double mse = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double r = x[t] - (mean + slope * (static_cast<double>(t) - tmean));
    mse += r * r;
  }
  mse /= nd;

  const double sd = std::sqrt(m2);
  const bool flat = m2 <= 1e-300;
  return {mean,
          sd,
          sorted.front(),
          sorted.back(),
          sorted.back() - sorted.front(),
          flat ? 0.0 : m3 / std::pow(m2, 1.5),
          flat ? 0.0 : m4 / (m2 * m2),
          percentile_sorted(sorted, 0.25),
          percentile_sorted(sorted, 0.5),
          percentile_sorted(sorted, 0.75),
          slope,
          mse};
}

std::vector<double> functionals(const nn::Matrix& c) {
  if (c.rows() < 2) {
    throw ValidationError("functionals: sequence needs at least 2 frames, got " +
                          std::to_string(c.rows()));
  }
  std::vector<double> out;
  out.reserve(c.cols() * kFunctionals);
  std::vector<double> col(c.rows());
  for (std::size_t j = 0; j < c.cols(); ++j) {
    for (std::size_t t = 0; t < c.rows(); ++t) col[t] = c(t, j);
    const auto f = contour_functionals(col);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::vector<double> functionals(const FrameSequence& seq) { return functionals(seq.frames); }

WindowedSequence window_sequence(const nn::Matrix& seq, std::size_t window, std::size_t step) {
  if (seq.rows() == 0) throw ValidationError("window_sequence: empty sequence");
  if (window == 0 || step == 0) throw ValidationError("window_sequence: window and step must be positive");
  WindowedSequence out;
  if (seq.rows() < window) {
    nn::Matrix w(window, seq.cols());
    std::copy(seq.values().begin(), seq.values().end(), w.values().begin());
    out.windows.push_back(std::move(w));
    out.padded = true;
    return out;
  }
  for (std::size_t s = 0; s + window <= seq.rows(); s += step) {
    nn::Matrix w(window, seq.cols());
    const auto first = seq.values().begin() + static_cast<std::ptrdiff_t>(s * seq.cols());
    std::copy(first, first + static_cast<std::ptrdiff_t>(window * seq.cols()), w.values().begin());
    out.windows.push_back(std::move(w));
  }
  return out;
}

}  // namespace scgan::audio
