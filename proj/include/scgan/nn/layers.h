#pragma once

// Dense and GRU layer kernels with hand-derived gradients.
//
// Kernels take views so the same code runs on standalone parameter structs
// and on tensors living inside a network's flat parameter buffer.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scgan/nn/tensor.h"

namespace scgan::nn {

enum class Activation { sigmoid, tanh, linear, softmax };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

double sigmoid(double x);

struct DenseRef {
  ConstMatrixView weight;  // out x in
  std::span<const double> bias;
  Activation activation = Activation::linear;
};

struct DenseGradRef {
  MatrixView weight;
  std::span<double> bias;
};

/// Standalone dense layer.
struct DenseLayerParams {
  Matrix weight;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::linear;

  DenseRef ref() const { return {weight.view(), bias, activation}; }
};

/// y = activation(W x + b), with dimension checks.
std::vector<double> dense_forward(std::span<const double> x, const DenseLayerParams& layer);

void dense_forward(const DenseRef& layer, std::span<const double> x, std::span<double> y);

/// Accumulates dW, db from dL/dy. Writes dL/dx when `dx` is non-empty.
void dense_backward(const DenseRef& layer, std::span<const double> x, std::span<const double> y,
                    std::span<const double> dy, const DenseGradRef& grad, std::span<double> dx);

/// Gate order everywhere: update (z), reset (r), candidate (h~).
enum GruGate : std::size_t { kUpdate = 0, kReset = 1, kCandidate = 2 };

struct GruRef {
  std::array<ConstMatrixView, 3> input;      // hidden x in
  std::array<ConstMatrixView, 3> recurrent;  // hidden x hidden
  std::array<std::span<const double>, 3> bias;

  std::size_t input_size() const { return input[0].cols; }
  std::size_t hidden_size() const { return input[0].rows; }
};

struct GruGradRef {
  std::array<MatrixView, 3> input;
  std::array<MatrixView, 3> recurrent;
  std::array<std::span<double>, 3> bias;
};

struct GruCellParams {
  std::array<Matrix, 3> input;
  std::array<Matrix, 3> recurrent;
  std::array<std::vector<double>, 3> bias;

  static GruCellParams zeros(std::size_t input_size, std::size_t hidden_size);
  /// Throws DimensionError when gate blocks disagree.
  void validate() const;
  GruRef ref() const;
};

struct GruStepCache {
  std::vector<double> x, h_prev, z, r, candidate, reset_hidden, h;
};

/// One GRU step, h = (1 - z) * h_prev + z * h~, with dimension checks.
std::vector<double> gru_step(std::span<const double> x, std::span<const double> h_prev,
                             const GruCellParams& p);

void gru_step_forward(const GruRef& p, std::span<const double> x, std::span<const double> h_prev,
                      GruStepCache& cache);

/// Given dL/dh for this step, accumulates parameter gradients and overwrites
/// dx and dh_prev (either may be empty to skip).
void gru_step_backward(const GruRef& p, const GruStepCache& cache, std::span<const double> dh,
                       const GruGradRef& grad, std::span<double> dx, std::span<double> dh_prev);

std::vector<double> softmax(std::span<const double> logits);
void softmax(std::span<const double> logits, std::span<double> out);
double log_sum_exp(std::span<const double> v);

/// -log softmax(logits)[target]. Throws on out-of-range target.
double softmax_cross_entropy(std::span<const double> logits, std::size_t target);

/// Same loss, and writes d loss / d logits = softmax - onehot into `dlogits`.
double softmax_cross_entropy(std::span<const double> logits, std::size_t target,
                             std::span<double> dlogits);

}  // namespace scgan::nn
