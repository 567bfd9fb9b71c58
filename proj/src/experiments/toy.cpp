#include "scgan/experiments/toy.h"

#include <cmath>
#include <numbers>

#include "scgan/error.h"

namespace scgan::experiments {

std::vector<std::vector<std::array<double, 2>>> ToyMixture::centers() const {
  std::vector<std::vector<std::array<double, 2>>> out(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(num_classes);
    const double cx = class_radius * std::cos(a), cy = class_radius * std::sin(a);
    if (modes_per_class == 1) {
      out[k].push_back({cx, cy});
      continue;
    }
    for (std::size_t m = 0; m < modes_per_class; ++m) {
      const double b = 2.0 * std::numbers::pi * static_cast<double>(m) /
                       static_cast<double>(modes_per_class);
      out[k].push_back({cx + mode_radius * std::cos(b), cy + mode_radius * std::sin(b)});
    }
  }
  return out;
}

data::Dataset ToyMixture::sample(std::size_t per_class, std::mt19937_64& rng) const {
  if (num_classes < 2 || modes_per_class < 1) throw ValidationError("toy: bad mixture shape");
  const auto c = centers();
  std::normal_distribution<double> g(0.0, stddev);
  data::Dataset set{data::DataKind::static_vector, num_classes, {}};
  for (std::size_t k = 0; k < num_classes; ++k) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto& m = c[k][i % modes_per_class];
      const double x = m[0] + g(rng);
      const double y = m[1] + g(rng);
      set.records.push_back(data::make_static({x, y}, k));
    }
  }
  return set;
}

std::size_t covered_modes(const ToyMixture& toy, std::size_t cls,
                          const std::vector<std::array<double, 2>>& points,
                          double min_fraction) {
  const auto c = toy.centers().at(cls);
  if (points.empty()) return 0;
  const double r2 = 4.0 * toy.stddev * toy.stddev;
  std::size_t covered = 0;
  for (const auto& m : c) {
    std::size_t hits = 0;
    for (const auto& p : points) {
      const double dx = p[0] - m[0], dy = p[1] - m[1];
      if (dx * dx + dy * dy <= r2) ++hits;
    }
    if (static_cast<double>(hits) >= min_fraction * static_cast<double>(points.size())) ++covered;
  }
  return covered;
}

}  // namespace scgan::experiments
