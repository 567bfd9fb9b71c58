#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scgan/nn/tensor.h"

namespace scgan::nn {

struct GradCheckReport {
  struct Entry {
    std::string tensor;
    double max_relative_error = 0.0;
  };
  std::vector<Entry> tensors;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

using LossFn = std::function<double(std::span<const double> params)>;

/// Central finite differences on every parameter against `analytic`.
/// Relative error is |a - n| / max(|a|, |n|, 1e-12); passes iff the maximum
/// is below `tol`.
GradCheckReport grad_check(const ParameterLayout& layout, std::span<const double> params,
                           std::span<const double> analytic, const LossFn& loss, double h,
                           double tol);

}  // namespace scgan::nn
