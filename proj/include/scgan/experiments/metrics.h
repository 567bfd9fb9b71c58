#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace scgan::experiments {

/// confusion[true][predicted].
using Confusion = std::vector<std::vector<std::size_t>>;

Confusion confusion_matrix(std::span<const std::size_t> predictions,
                           std::span<const std::size_t> labels, std::size_t num_classes);

/// Unweighted average recall over all K classes. A class with no labelled
/// examples contributes recall 0 and a message in `warnings`.
double uar(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
           std::size_t num_classes, std::vector<std::string>* warnings = nullptr);
double uar(const Confusion& confusion, std::vector<std::string>* warnings = nullptr);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for fewer than two values
};
MeanSd mean_sd(std::span<const double> values);

}  // namespace scgan::experiments
