#include "scgan/audio/boaw.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scgan/error.h"

namespace scgan::audio {

const char* to_string(CodebookMethod m) { return m == CodebookMethod::random ? "random" : "kmeans"; }

CodebookMethod codebook_method_from_string(const std::string& s) {
  if (s == "kmeans") return CodebookMethod::kmeans;
  if (s == "random") return CodebookMethod::random;
  throw ValidationError("unknown codebook method '" + s + "' (expected kmeans or random)");
}

namespace {

void copy_row(nn::ConstMatrixView src, std::size_t i, nn::Matrix& dst, std::size_t j) {
  const auto r = src.row(i);
  std::copy(r.begin(), r.end(), dst.row(j).begin());
}

}  // namespace

Codebook build_codebook(nn::ConstMatrixView frames, std::size_t S, CodebookMethod method,
                        std::mt19937_64& rng, const KmeansParams& params, parallel::Exec exec) {
  const std::size_t n = frames.rows, d = frames.cols;
  if (S == 0) throw ValidationError("codebook: size must be positive");
  if (S > n) {
    throw ValidationError("codebook: size " + std::to_string(S) + " exceeds frame count " +
                          std::to_string(n));
  }
  Codebook cb;
  cb.method = method;
  cb.words = nn::Matrix(S, d);

  if (method == CodebookMethod::random) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < S; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, n - 1);
      std::swap(idx[j], idx[pick(rng)]);
      copy_row(frames, idx[j], cb.words, j);
    }
    return cb;
  }

  // k-means++ seeding.
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  copy_row(frames, first(rng), cb.words, 0);
  nn::Matrix dist(n, 1);
  for (std::size_t j = 1; j < S; ++j) {
    const nn::Matrix last(1, d, std::vector<double>(cb.words.row(j - 1).begin(),
                                                    cb.words.row(j - 1).end()));
    if (exec == parallel::Exec::omp) {
      parallel::squared_distances_omp(frames, last.view(), dist.view());
    } else {
      parallel::squared_distances_serial(frames, last.view(), dist.view());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], dist(i, 0));
      total += best[i];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double cum = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += best[i];
        if (cum >= target && best[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    copy_row(frames, chosen, cb.words, j);
  }

  // Lloyd iterations.
  double prev = std::numeric_limits<double>::infinity();
  nn::Matrix all(n, S);
  std::vector<std::size_t> assign(n);
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    if (exec == parallel::Exec::omp) {
      parallel::squared_distances_omp(frames, cb.words.view(), all.view());
    } else {
      parallel::squared_distances_serial(frames, cb.words.view(), all.view());
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = all.row(i);
      assign[i] = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
      inertia += r[assign[i]];
    }
    cb.inertia.push_back(inertia);
    nn::Matrix sums(S, d);
    std::vector<std::size_t> counts(S, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = frames.row(i);
      auto s = sums.row(assign[i]);
      for (std::size_t c = 0; c < d; ++c) s[c] += r[c];
      ++counts[assign[i]];
    }
    for (std::size_t j = 0; j < S; ++j) {
      if (counts[j] == 0) continue;
      auto w = cb.words.row(j);
      const auto s = sums.row(j);
      for (std::size_t c = 0; c < d; ++c) w[c] = s[c] / static_cast<double>(counts[j]);
    }
    const bool done = prev < std::numeric_limits<double>::infinity() &&
                      (prev == 0.0 || std::abs(prev - inertia) / prev < params.tolerance);
    prev = inertia;
    if (done) break;
  }
  return cb;
}

std::vector<double> boaw(nn::ConstMatrixView seq, const Codebook& codebook, std::size_t n,
                         parallel::Exec exec) {
  const std::size_t S = codebook.size();
  if (n < 1 || n > S) {
    throw ValidationError("boaw: n=" + std::to_string(n) + " outside [1, " + std::to_string(S) +
                          "]");
  }
  require_dims(seq.cols == codebook.dim(), "boaw: frame width does not match codebook");
  if (seq.rows == 0) throw ValidationError("boaw: empty sequence");
  const auto idx = parallel::nearest_rows(exec, seq, codebook.words.view(), n);
  std::vector<double> h(S, 0.0);
  for (std::size_t i : idx) h[i] += 1.0;
  const double norm = static_cast<double>(n) * static_cast<double>(seq.rows);
  for (double& v : h) v /= norm;
  return h;
}

}  // namespace scgan::audio
