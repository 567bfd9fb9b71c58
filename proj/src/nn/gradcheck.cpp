#include "scgan/nn/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "scgan/error.h"

namespace scgan::nn {

GradCheckReport grad_check(const ParameterLayout& layout, std::span<const double> params,
                           std::span<const double> analytic, const LossFn& loss, double h,
                           double tol) {
  if (!(h > 0.0)) throw ValidationError("grad_check: step h must be positive");
  require_dims(params.size() == layout.total() && analytic.size() == layout.total(),
               "grad_check: buffer sizes do not match layout");
  std::vector<double> probe(params.begin(), params.end());
  GradCheckReport report;
  report.tolerance = tol;
  for (const auto& slot : layout.slots()) {
    double worst = 0.0;
    for (std::size_t k = slot.offset; k < slot.offset + slot.size(); ++k) {
      const double saved = probe[k];
      probe[k] = saved + h;
      const double up = loss(probe);
      probe[k] = saved - h;
      const double down = loss(probe);
      probe[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    report.tensors.push_back({slot.name, worst});
    report.max_relative_error = std::max(report.max_relative_error, worst);
  }
  report.pass = report.max_relative_error < tol;
  return report;
}

}  // namespace scgan::nn
