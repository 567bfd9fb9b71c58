#pragma once

#include <cstddef>
#include <array>
#include <random>
#include <vector>

#include "scgan/data/dataset.h"

namespace scgan::experiments {

/// 2-D Gaussian mixture with `modes_per_class` isotropic modes per class.
/// Class centres sit on a circle; a class with several modes spreads them on
/// a ring around its centre.
struct ToyMixture {
  std::size_t num_classes = 4;
  std::size_t modes_per_class = 1;
  double class_radius = 3.0;
  double mode_radius = 1.5;
  double stddev = 0.3;

  /// centers()[k][m] = (x, y) of mode m of class k.
  std::vector<std::vector<std::array<double, 2>>> centers() const;
  /// n samples per class, equal weight per mode.
  data::Dataset sample(std::size_t per_class, std::mt19937_64& rng) const;
};

/// Modes whose 2-sigma disc receives at least `min_fraction` of `points`.
std::size_t covered_modes(const ToyMixture& toy, std::size_t cls,
                          const std::vector<std::array<double, 2>>& points,
                          double min_fraction = 0.02);

}  // namespace scgan::experiments
