#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "scgan/gan/config.h"
#include "scgan/nn/network.h"

namespace scgan::gan {

struct LatentVector {
  std::vector<double> z;
};

/// One-hot class indicator of length K.
struct ConditionVector {
  std::size_t index = 0;
  std::size_t num_classes = 0;

  ConditionVector(std::size_t index, std::size_t num_classes);
  std::vector<double> one_hot() const;
};

/// I.i.d. draws: N(0, 1) for the Gaussian prior, U[-1, 1] for the uniform one.
LatentVector sample_latent(std::size_t latent_dim, Prior prior, std::mt19937_64& rng);

/// G(z | c). Static data: dense stack over [z | c]. Sequences: GRU stack with
/// a linear projection per step; step 1 reads [z | c], step t > 1 reads
/// [x_{t-1} | c] and carries the hidden state. z and x share one zero-padded
/// input slot of width max(latent_dim, feature_dim).
class Generator {
 public:
  struct Tape {
    nn::DenseNet::Tape dense;
    nn::GruNet::Tape gru;
    nn::Matrix output;
  };

  Generator() = default;
  Generator(const ScganConfig& cfg, std::size_t feature_dim);

  const nn::ParameterLayout& layout() const;
  data::DataKind kind() const { return kind_; }
  std::size_t feature_dim() const { return feature_dim_; }

  /// Static: 1 x d. Sequence: steps x d.
  nn::Matrix forward(std::span<const double> params, std::span<const double> z,
                     const ConditionVector& c, std::size_t steps, Tape* tape = nullptr) const;

  /// Accumulates parameter gradients given dL/d(output), including the
  /// path through the fed-back outputs of a sequence.
  void backward(std::span<const double> params, const Tape& tape, nn::ConstMatrixView dout,
                std::span<double> grad) const;

 private:
  data::DataKind kind_ = data::DataKind::static_vector;
  std::size_t latent_dim_ = 0, feature_dim_ = 0, num_classes_ = 0, slot_ = 0;
  nn::DenseNet dense_;
  nn::GruNet gru_;
};

/// Static: dense stack with an extra dense head. Sequence: GRU stack read
/// many-to-one. Outputs logits (K + 1 classes, or real/fake in cgan mode,
/// where the condition is appended to every input frame).
class Discriminator {
 public:
  struct Tape {
    nn::DenseNet::Tape dense;
    nn::GruNet::Tape gru;
  };

  Discriminator() = default;
  Discriminator(const ScganConfig& cfg, std::size_t feature_dim);

  const nn::ParameterLayout& layout() const;
  std::size_t outputs() const { return outputs_; }
  bool conditioned() const { return conditioned_; }

  std::vector<double> forward(std::span<const double> params, nn::ConstMatrixView x,
                              std::optional<std::size_t> cls, Tape* tape = nullptr) const;

  /// Accumulates parameter gradients; writes dL/dx (rows x feature_dim) when
  /// dx is non-empty.
  void backward(std::span<const double> params, const Tape& tape,
                std::span<const double> dlogits, std::span<double> grad,
                nn::MatrixView dx) const;

 private:
  data::DataKind kind_ = data::DataKind::static_vector;
  std::size_t feature_dim_ = 0, num_classes_ = 0, outputs_ = 0;
  bool conditioned_ = false;
  nn::DenseNet dense_;
  nn::GruNet gru_;
};

/// Output index of the "fake" class: K in scgan/sgan, 1 in cgan (0 is real).
std::size_t fake_index(const ScganConfig& cfg);
std::size_t real_index_cgan();

class ScganModel {
 public:
  ScganModel() = default;
  /// Fresh model: Gaussian weights (config.init_stddev), zero biases.
  static ScganModel create(const ScganConfig& cfg, std::size_t feature_dim);
  /// Model with the given parameter buffers (sizes checked).
  static ScganModel from_parameters(const ScganConfig& cfg, std::size_t feature_dim,
                                    std::vector<double> generator_params,
                                    std::vector<double> discriminator_params);

  const ScganConfig& config() const { return config_; }
  std::size_t feature_dim() const { return feature_dim_; }
  const Generator& generator() const { return generator_; }
  const Discriminator& discriminator() const { return discriminator_; }
  std::vector<double>& generator_params() { return g_params_; }
  std::vector<double>& discriminator_params() { return d_params_; }
  const std::vector<double>& generator_params() const { return g_params_; }
  const std::vector<double>& discriminator_params() const { return d_params_; }

  std::vector<double> generate_static(const LatentVector& z, const ConditionVector& c) const;
  nn::Matrix generate_sequence(const LatentVector& z, const ConditionVector& c,
                               std::size_t steps) const;
  /// Static or sequence according to the configured data kind.
  nn::Matrix generate(const LatentVector& z, const ConditionVector& c) const;

  std::vector<double> discriminate(nn::ConstMatrixView x,
                                   std::optional<std::size_t> cls = std::nullopt) const;
  std::vector<double> discriminator_posteriors(nn::ConstMatrixView x,
                                               std::optional<std::size_t> cls = std::nullopt) const;

 private:
  ScganConfig config_;
  std::size_t feature_dim_ = 0;
  Generator generator_;
  Discriminator discriminator_;
  std::vector<double> g_params_, d_params_;
};

// Per-sample loss terms on discriminator logits. Each returns the loss and,
// when `dlogits` is non-empty, writes its gradient.

/// Real term: CE toward the true class (scgan/sgan) or toward "real" (cgan).
double real_term(Mode mode, std::span<const double> logits, std::size_t label,
                 std::span<double> dlogits);
/// Fake term of the discriminator loss: CE toward the fake class.
double fake_term(Mode mode, std::span<const double> logits, std::span<double> dlogits);
/// Generator loss on one fake: CE toward the condition (scgan), -log of the
/// mass on the first K classes (sgan), CE toward "real" (cgan).
double generator_term(Mode mode, std::span<const double> logits, std::size_t condition,
                      std::span<double> dlogits);

/// Mean real term plus mean fake term (each mean over its own batch; an
/// empty fake batch contributes nothing).
double discriminator_loss(Mode mode, const std::vector<std::vector<double>>& real_logits,
                          std::span<const std::size_t> labels,
                          const std::vector<std::vector<double>>& fake_logits);
double generator_loss(Mode mode, const std::vector<std::vector<double>>& fake_logits,
                      std::span<const std::size_t> conditions);

/// Model-level losses (negated log-likelihood objectives, data term only).
double discriminator_loss(const ScganModel& model, const std::vector<nn::Matrix>& real,
                          std::span<const std::size_t> labels,
                          const std::vector<nn::Matrix>& fake,
                          std::span<const std::size_t> fake_conditions);
double generator_loss(const ScganModel& model, const std::vector<nn::Matrix>& fake,
                      std::span<const std::size_t> conditions);

}  // namespace scgan::gan
