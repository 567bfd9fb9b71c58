#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scgan/nn/network.h"
#include "scgan/parallel/kernels.h"

namespace scgan::classifiers {

/// Class decision with its scores; cls is the argmax (lowest index on ties).
struct Prediction {
  std::size_t cls = 0;
  std::vector<double> scores;
};

Prediction argmax_prediction(std::vector<double> scores);

// ------------------------------------------------------------- scaling

/// Per-feature standardization fitted on training rows. Constant features
/// keep scale 1.
struct Standardizer {
  std::vector<double> mean, scale;

  static Standardizer fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<std::vector<double>> apply(const std::vector<std::vector<double>>& rows) const;
};

// ----------------------------------------------------------------- SVM

struct SvmParams {
  double C = 1e-4;
  double tolerance = 1e-4;        // relative duality gap
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;         // coordinate order
};

struct LinearSvmModel {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  nn::Matrix weights;         // K x d
  std::vector<double> bias;   // K
  double C = 0.0;

  nn::ParameterLayout layout() const;
};

/// Per binary problem: dual objective after every epoch, final relative gap.
struct SvmTrace {
  std::vector<std::vector<double>> dual;
  std::vector<double> gap;
  std::vector<std::size_t> epochs;
};

/// One-vs-rest L2-regularized hinge loss, solved in the dual by coordinate
/// descent with the bias as a constant-1 feature.
LinearSvmModel train_svm(const std::vector<std::vector<double>>& X,
                         std::span<const std::size_t> y, std::size_t num_classes,
                         const SvmParams& params, SvmTrace* trace = nullptr,
                         parallel::Exec exec = parallel::Exec::omp);

std::vector<double> svm_decision(const LinearSvmModel& model, std::span<const double> x);
Prediction svm_predict(const LinearSvmModel& model, std::span<const double> x);

// ------------------------------------------------------ GRU classifier

struct GruClassifierConfig {
  std::size_t hidden_size = 60;
  std::size_t layers = 2;
  double lr = 0.01;
  double l2 = 1e-4;
  std::size_t batch_size = 64;
  std::size_t steps = 200;   // minibatch updates
  double init_stddev = 0.1;
  std::uint64_t seed = 0;
};

struct GruClassifierModel {
  nn::GruNet net;
  std::vector<double> params;
  std::size_t num_classes = 0;
};

/// Many-to-one GRU over equal-shape windows, Adam on mean softmax CE + L2.
GruClassifierModel train_gru_classifier(const std::vector<nn::Matrix>& windows,
                                        std::span<const std::size_t> labels,
                                        std::size_t num_classes,
                                        const GruClassifierConfig& cfg,
                                        parallel::Exec exec = parallel::Exec::omp);

/// Posteriors as scores.
Prediction gru_predict(const GruClassifierModel& model, const nn::Matrix& window);

/// Majority vote over windows; ties go to the highest summed posterior,
/// then to the lowest index. Scores are the summed posteriors.
Prediction vote(const std::vector<Prediction>& windows);
Prediction predict_recording(const GruClassifierModel& model,
                             const std::vector<nn::Matrix>& windows);

}  // namespace scgan::classifiers
