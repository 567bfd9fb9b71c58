#include "scgan/experiments/metrics.h"

#include <cmath>

#include "scgan/error.h"

namespace scgan::experiments {

Confusion confusion_matrix(std::span<const std::size_t> predictions,
                           std::span<const std::size_t> labels, std::size_t num_classes) {
  require_dims(predictions.size() == labels.size(), "uar: predictions and labels differ in length");
  if (labels.empty()) throw ValidationError("uar: empty input");
  Confusion c(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes || predictions[i] >= num_classes) {
      throw ValidationError("uar: class index out of range");
    }
    ++c[labels[i]][predictions[i]];
  }
  return c;
}

double uar(const Confusion& confusion, std::vector<std::string>* warnings) {
  if (confusion.empty()) throw ValidationError("uar: no classes");
  double sum = 0.0;
  for (std::size_t k = 0; k < confusion.size(); ++k) {
    std::size_t total = 0;
    for (auto v : confusion[k]) total += v;
    if (total == 0) {
      if (warnings) warnings->push_back("class " + std::to_string(k) + " has no labelled examples");
      continue;
    }
    sum += static_cast<double>(confusion[k][k]) / static_cast<double>(total);
  }
  return sum / static_cast<double>(confusion.size());
}

double uar(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
           std::size_t num_classes, std::vector<std::string>* warnings) {
  return uar(confusion_matrix(predictions, labels, num_classes), warnings);
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd r;
  if (values.empty()) return r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return r;
}

}  // namespace scgan::experiments
