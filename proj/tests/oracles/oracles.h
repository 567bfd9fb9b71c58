#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Scalar, element-by-element GRU step. Weights given as nested vectors
/// [gate][row][col] with gate order update, reset, candidate.
struct ScalarGru {
  std::vector<std::vector<std::vector<double>>> w;  // [3][hidden][in]
  std::vector<std::vector<std::vector<double>>> u;  // [3][hidden][hidden]
  std::vector<std::vector<double>> b;               // [3][hidden]

  std::vector<double> step(const std::vector<double>& x, const std::vector<double>& h) const {
    const std::size_t hidden = b[0].size();
    std::vector<double> z(hidden), r(hidden), out(hidden);
    for (std::size_t i = 0; i < hidden; ++i) {
      double az = b[0][i], ar = b[1][i];
      for (std::size_t j = 0; j < x.size(); ++j) {
        az += w[0][i][j] * x[j];
        ar += w[1][i][j] * x[j];
      }
      for (std::size_t j = 0; j < hidden; ++j) {
        az += u[0][i][j] * h[j];
        ar += u[1][i][j] * h[j];
      }
      z[i] = sig(az);
      r[i] = sig(ar);
    }
    for (std::size_t i = 0; i < hidden; ++i) {
      double ah = b[2][i];
      for (std::size_t j = 0; j < x.size(); ++j) ah += w[2][i][j] * x[j];
      for (std::size_t j = 0; j < hidden; ++j) ah += u[2][i][j] * (r[j] * h[j]);
      const double cand = std::tanh(ah);
      out[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
    }
    return out;
  }
};

/// -log(exp(l_t) / sum exp(l_j)) evaluated directly.
inline double direct_cross_entropy(const std::vector<double>& logits, std::size_t target) {
  double s = 0.0;
  for (double l : logits) s += std::exp(l);
  return -std::log(std::exp(logits[target]) / s);
}

/// Scalar Adam recurrence; returns the update magnitude at each step.
inline std::vector<double> adam_scalar_updates(double g, double lr, int steps) {
  double m = 0.0, v = 0.0;
  std::vector<double> updates;
  for (int t = 1; t <= steps; ++t) {
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    updates.push_back(lr * mh / (std::sqrt(vh) + 1e-8));
  }
  return updates;
}

/// Percentile with linear interpolation between closest ranks.
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Least-squares slope of v against 0..n-1.
inline double ls_slope(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += v[i];
    sxx += x * x;
    sxy += x * v[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Recall averaged over classes by explicit counting.
inline double counted_uar(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& y,
                          std::size_t k) {
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t hit = 0, n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] != c) continue;
      ++n;
      if (pred[i] == c) ++hit;
    }
    if (n > 0) total += static_cast<double>(hit) / static_cast<double>(n);
  }
  return total / static_cast<double>(k);
}

/// Power of a signal: mean square.
inline double power(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

/// Bag-of-words histogram by exhaustive scans: each frame picks its n
/// closest codewords one at a time, lowest index first among equals.
inline std::vector<double> boaw_bruteforce(const std::vector<std::vector<double>>& frames,
                                           const std::vector<std::vector<double>>& words,
                                           std::size_t n) {
  std::vector<double> h(words.size(), 0.0);
  for (const auto& f : frames) {
    std::vector<bool> used(words.size(), false);
    for (std::size_t pick = 0; pick < n; ++pick) {
      std::size_t best = words.size();
      double bd = 0.0;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (used[w]) continue;
        double d = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) d += (f[j] - words[w][j]) * (f[j] - words[w][j]);
        if (best == words.size() || d < bd) {
          best = w;
          bd = d;
        }
      }
      used[best] = true;
      h[best] += 1.0;
    }
  }
  for (double& v : h) v /= static_cast<double>(n * frames.size());
  return h;
}

/// |X_k|^2 of a zero-padded length-N DFT, k = 0..N/2, by direct summation.
inline std::vector<double> dft_power(const std::vector<double>& x, std::size_t N) {
  std::vector<double> out(N / 2 + 1);
  const double pi = 3.14159265358979323846;
  for (std::size_t k = 0; k <= N / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      const double a = -2.0 * pi * static_cast<double>(k * t) / static_cast<double>(N);
      re += x[t] * std::cos(a);
      im += x[t] * std::sin(a);
    }
    out[k] = re * re + im * im;
  }
  return out;
}

/// Sample mean and population moments of a contour.
inline double central_moment(const std::vector<double>& v, int order) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += std::pow(x - m, order);
  return s / static_cast<double>(v.size());
}

}  // namespace oracle
