#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scgan/nn/tensor.h"

namespace scgan::nn {

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_size(std::size_t n);
};

/// One bias-corrected Adam step. Throws DivergenceError on a non-finite gradient.
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                 double lr);

/// Same, folding l2 * w into the gradient of every decaying tensor first.
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                 double lr, double l2, const ParameterLayout& layout);

}  // namespace scgan::nn
