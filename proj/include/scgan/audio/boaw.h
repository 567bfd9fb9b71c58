#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "scgan/nn/tensor.h"
#include "scgan/parallel/kernels.h"

namespace scgan::audio {

enum class CodebookMethod { kmeans, random };
const char* to_string(CodebookMethod m);
CodebookMethod codebook_method_from_string(const std::string& s);

struct Codebook {
  nn::Matrix words;  // S x d
  CodebookMethod method = CodebookMethod::kmeans;
  std::vector<double> inertia;  // per Lloyd iteration (kmeans only)

  std::size_t size() const { return words.rows(); }
  std::size_t dim() const { return words.cols(); }
};

struct KmeansParams {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // relative inertia change
};

/// kmeans: k-means++ seeding then Lloyd iterations; an emptied cluster keeps
/// its previous centroid. random: S distinct frames sampled without
/// replacement. Throws ValidationError when S exceeds the frame count.
Codebook build_codebook(nn::ConstMatrixView frames, std::size_t S, CodebookMethod method,
                        std::mt19937_64& rng, const KmeansParams& params = {},
                        parallel::Exec exec = parallel::Exec::omp);

/// Each frame adds 1 to each of its n nearest codewords (lower index wins
/// ties); the histogram is divided by n * T.
std::vector<double> boaw(nn::ConstMatrixView seq, const Codebook& codebook, std::size_t n,
                         parallel::Exec exec = parallel::Exec::omp);

}  // namespace scgan::audio
