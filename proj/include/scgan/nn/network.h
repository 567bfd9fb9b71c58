#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "scgan/nn/layers.h"
#include "scgan/nn/tensor.h"
#include "scgan/parallel/kernels.h"

namespace scgan::nn {

/// Zero-mean Gaussian weights (sd 0.1 by default), zero biases.
std::vector<double> init_parameters(const ParameterLayout& layout, std::mt19937_64& rng,
                                    double stddev = 0.1);

/// Stack of dense layers: sizes = {in, h1, ..., out}.
class DenseNet {
 public:
  struct Tape {
    std::vector<std::vector<double>> activations;  // [0] is the input
  };

  DenseNet() = default;
  DenseNet(std::vector<std::size_t> sizes, Activation hidden, Activation output);

  const ParameterLayout& layout() const { return layout_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t num_layers() const { return sizes_.size() - 1; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  DenseRef layer(std::span<const double> params, std::size_t i) const;
  DenseGradRef layer_grad(std::span<double> grad, std::size_t i) const;

  void forward(std::span<const double> params, std::span<const double> x, Tape& tape) const;
  std::vector<double> forward(std::span<const double> params, std::span<const double> x) const;

  /// Accumulates into `grad`; writes dL/dx when `dx` is non-empty.
  void backward(std::span<const double> params, const Tape& tape, std::span<const double> dout,
                std::span<double> grad, std::span<double> dx) const;

 private:
  std::vector<std::size_t> sizes_;
  Activation hidden_ = Activation::tanh;
  Activation output_ = Activation::linear;
  ParameterLayout layout_;
  std::vector<std::size_t> weight_slot_, bias_slot_;
};

/// Stack of GRU layers with a dense head reading the top hidden state.
/// Initial hidden state is zero.
class GruNet {
 public:
  struct Tape {
    std::vector<std::vector<GruStepCache>> steps;  // [t][layer]
    std::vector<std::vector<double>> state;        // current hidden per layer
  };

  /// Fills `dtop` (zeroed by the caller) with dL/dh_top at step t. `dx_next`
  /// is dL/d(input at t+1), empty at the last step.
  using TopGradFn =
      std::function<void(std::size_t t, std::span<const double> dx_next, std::span<double> dtop)>;

  GruNet() = default;
  GruNet(std::size_t input_size, std::size_t hidden_size, std::size_t layers,
         std::size_t head_size, Activation head_activation = Activation::linear);

  const ParameterLayout& layout() const { return layout_; }
  std::size_t input_size() const { return input_; }
  std::size_t hidden_size() const { return hidden_; }
  std::size_t num_layers() const { return layers_; }
  std::size_t head_size() const { return head_; }
  Activation head_activation() const { return head_act_; }

  GruRef cell(std::span<const double> params, std::size_t layer) const;
  GruGradRef cell_grad(std::span<double> grad, std::size_t layer) const;
  DenseRef head(std::span<const double> params) const;
  DenseGradRef head_grad(std::span<double> grad) const;

  void reset(Tape& tape) const;
  /// Advances every layer one step; returns the top hidden state.
  std::span<const double> step(std::span<const double> params, std::span<const double> x,
                               Tape& tape) const;

  /// Many-to-one: runs the sequence (T x input) and applies the head to the
  /// final top hidden state.
  std::vector<double> forward_last(std::span<const double> params, ConstMatrixView seq,
                                   Tape& tape) const;
  std::vector<double> forward_last(std::span<const double> params, ConstMatrixView seq) const;

  /// Backpropagation through time. Writes dL/dx (T x input) when dx is non-empty.
  void backward(std::span<const double> params, const Tape& tape, const TopGradFn& top_grad,
                std::span<double> grad, MatrixView dx) const;

  /// Backward for forward_last given dL/d(head output).
  void backward_last(std::span<const double> params, const Tape& tape,
                     std::span<const double> dhead, std::span<double> grad, MatrixView dx) const;

 private:
  std::size_t input_ = 0, hidden_ = 0, layers_ = 0, head_ = 0;
  Activation head_act_ = Activation::linear;
  ParameterLayout layout_;
  struct CellSlots {
    std::array<std::size_t, 3> input, recurrent, bias;
  };
  std::vector<CellSlots> cells_;
  std::size_t head_weight_ = 0, head_bias_ = 0;
};

struct LossBreakdown {
  double data = 0.0;  // mean batch loss
  double l2 = 0.0;    // 0.5 * l2 * |W|^2 over weights
  double total() const { return data + l2; }
};

/// Mean softmax cross-entropy of a dense classifier (linear logits) plus L2.
/// `grad` is overwritten with the gradient of the total.
LossBreakdown classification_backward(const DenseNet& net, std::span<const double> params,
                                      const std::vector<std::vector<double>>& inputs,
                                      std::span<const std::size_t> targets, double l2,
                                      std::span<double> grad,
                                      parallel::Exec exec = parallel::Exec::omp);
LossBreakdown classification_loss(const DenseNet& net, std::span<const double> params,
                                  const std::vector<std::vector<double>>& inputs,
                                  std::span<const std::size_t> targets, double l2);

/// Same for a many-to-one GRU classifier over sequences.
LossBreakdown classification_backward(const GruNet& net, std::span<const double> params,
                                      const std::vector<Matrix>& sequences,
                                      std::span<const std::size_t> targets, double l2,
                                      std::span<double> grad,
                                      parallel::Exec exec = parallel::Exec::omp);
LossBreakdown classification_loss(const GruNet& net, std::span<const double> params,
                                  const std::vector<Matrix>& sequences,
                                  std::span<const std::size_t> targets, double l2);

}  // namespace scgan::nn
