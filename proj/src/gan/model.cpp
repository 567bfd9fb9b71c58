#include "scgan/gan/model.h"

#include <algorithm>
#include <cmath>

#include "scgan/error.h"

namespace scgan::gan {

using data::DataKind;

ConditionVector::ConditionVector(std::size_t index_, std::size_t num_classes_)
    : index(index_), num_classes(num_classes_) {
  if (index >= num_classes) {
    throw ValidationError("condition class " + std::to_string(index) + " >= " +
                          std::to_string(num_classes));
  }
}

std::vector<double> ConditionVector::one_hot() const {
  std::vector<double> v(num_classes, 0.0);
  v[index] = 1.0;
  return v;
}

LatentVector sample_latent(std::size_t latent_dim, Prior prior, std::mt19937_64& rng) {
  if (latent_dim == 0) throw ValidationError("latent_dim must be positive");
  LatentVector out{std::vector<double>(latent_dim)};
  if (prior == Prior::uniform) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : out.z) v = u(rng);
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : out.z) v = g(rng);
  }
  return out;
}

std::size_t fake_index(const ScganConfig& cfg) {
  return cfg.mode == Mode::cgan ? 1 : cfg.num_classes;
}

std::size_t real_index_cgan() { return 0; }

// ---------------------------------------------------------------- Generator

Generator::Generator(const ScganConfig& cfg, std::size_t feature_dim)
    : kind_(cfg.data_kind),
      latent_dim_(cfg.latent_dim),
      feature_dim_(feature_dim),
      num_classes_(cfg.num_classes) {
  if (feature_dim == 0) throw ValidationError("generator: feature_dim must be positive");
  if (kind_ == DataKind::static_vector) {
    std::vector<std::size_t> sizes{latent_dim_ + num_classes_};
    for (std::size_t l = 0; l < cfg.hidden_layers; ++l) sizes.push_back(cfg.hidden_size);
    sizes.push_back(feature_dim_);
    dense_ = nn::DenseNet(sizes, nn::Activation::tanh, nn::Activation::linear);
  } else {
    slot_ = std::max(latent_dim_, feature_dim_);
    gru_ = nn::GruNet(slot_ + num_classes_, cfg.hidden_size, cfg.hidden_layers, feature_dim_,
                      nn::Activation::linear);
  }
}

const nn::ParameterLayout& Generator::layout() const {
  return kind_ == DataKind::static_vector ? dense_.layout() : gru_.layout();
}

nn::Matrix Generator::forward(std::span<const double> params, std::span<const double> z,
                              const ConditionVector& c, std::size_t steps, Tape* tape) const {
  require_dims(z.size() == latent_dim_, "generator: latent length " + std::to_string(z.size()) +
                                            " != " + std::to_string(latent_dim_));
  require_dims(c.num_classes == num_classes_, "generator: condition width mismatch");
  Tape local;
  Tape& tp = tape ? *tape : local;
  if (kind_ == DataKind::static_vector) {
    std::vector<double> input(z.begin(), z.end());
    input.resize(latent_dim_ + num_classes_, 0.0);
    input[latent_dim_ + c.index] = 1.0;
    dense_.forward(params, input, tp.dense);
    tp.output = nn::Matrix(1, feature_dim_, tp.dense.activations.back());
    return tp.output;
  }
  if (steps == 0) throw ValidationError("generator: sequence length must be >= 1");
  tp.output = nn::Matrix(steps, feature_dim_);
  gru_.reset(tp.gru);
  std::vector<double> input(slot_ + num_classes_, 0.0);
  std::copy(z.begin(), z.end(), input.begin());
  input[slot_ + c.index] = 1.0;
  const auto head = gru_.head(params);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto h = gru_.step(params, input, tp.gru);
    auto row = tp.output.row(t);
    nn::dense_forward(head, h, row);
    std::fill(input.begin(), input.end(), 0.0);
    std::copy(row.begin(), row.end(), input.begin());
    input[slot_ + c.index] = 1.0;
  }
  return tp.output;
}

void Generator::backward(std::span<const double> params, const Tape& tape,
                         nn::ConstMatrixView dout, std::span<double> grad) const {
  require_dims(dout.rows == tape.output.rows() && dout.cols == feature_dim_,
               "generator backward: output gradient shape mismatch");
  if (kind_ == DataKind::static_vector) {
    dense_.backward(params, tape.dense, dout.row(0), grad, {});
    return;
  }
  const auto head = gru_.head(params);
  const auto head_grad = gru_.head_grad(grad);
  const std::size_t top = gru_.num_layers() - 1;
  std::vector<double> dxh(feature_dim_);
  gru_.backward(
      params, tape.gru,
      [&](std::size_t t, std::span<const double> dx_next, std::span<double> dtop) {
        const auto d = dout.row(t);
        std::copy(d.begin(), d.end(), dxh.begin());
        if (!dx_next.empty()) {
          for (std::size_t j = 0; j < feature_dim_; ++j) dxh[j] += dx_next[j];
        }
        nn::dense_backward(head, tape.gru.steps[t][top].h, tape.output.row(t), dxh, head_grad,
                           dtop);
      },
      grad, {});
}

// ------------------------------------------------------------ Discriminator

Discriminator::Discriminator(const ScganConfig& cfg, std::size_t feature_dim)
    : kind_(cfg.data_kind),
      feature_dim_(feature_dim),
      num_classes_(cfg.num_classes),
      outputs_(cfg.mode == Mode::cgan ? 2 : cfg.num_classes + 1),
      conditioned_(cfg.mode == Mode::cgan) {
  const std::size_t in = feature_dim_ + (conditioned_ ? num_classes_ : 0);
  if (kind_ == DataKind::static_vector) {
    std::vector<std::size_t> sizes{in};
    for (std::size_t l = 0; l < cfg.hidden_layers; ++l) sizes.push_back(cfg.hidden_size);
    sizes.push_back(outputs_);
    dense_ = nn::DenseNet(sizes, nn::Activation::tanh, nn::Activation::linear);
  } else {
    gru_ = nn::GruNet(in, cfg.hidden_size, cfg.hidden_layers, outputs_, nn::Activation::linear);
  }
}

const nn::ParameterLayout& Discriminator::layout() const {
  return kind_ == DataKind::static_vector ? dense_.layout() : gru_.layout();
}

std::vector<double> Discriminator::forward(std::span<const double> params, nn::ConstMatrixView x,
                                           std::optional<std::size_t> cls, Tape* tape) const {
  require_dims(x.cols == feature_dim_, "discriminator: input width " + std::to_string(x.cols) +
                                           " != " + std::to_string(feature_dim_));
  if (conditioned_ && !cls) throw ValidationError("cgan discriminator needs a condition");
  if (cls && *cls >= num_classes_) throw ValidationError("discriminator: condition out of range");
  Tape local;
  Tape& tp = tape ? *tape : local;
  if (kind_ == DataKind::static_vector) {
    require_dims(x.rows == 1, "discriminator: static input must be one row");
    std::vector<double> input(x.values.begin(), x.values.end());
    if (conditioned_) {
      input.resize(feature_dim_ + num_classes_, 0.0);
      input[feature_dim_ + *cls] = 1.0;
    }
    dense_.forward(params, input, tp.dense);
    return tp.dense.activations.back();
  }
  if (!conditioned_) return gru_.forward_last(params, x, tp.gru);
  nn::Matrix input(x.rows, feature_dim_ + num_classes_);
  for (std::size_t t = 0; t < x.rows; ++t) {
    std::copy(x.row(t).begin(), x.row(t).end(), input.row(t).begin());
    input(t, feature_dim_ + *cls) = 1.0;
  }
  return gru_.forward_last(params, input.view(), tp.gru);
}

void Discriminator::backward(std::span<const double> params, const Tape& tape,
                             std::span<const double> dlogits, std::span<double> grad,
                             nn::MatrixView dx) const {
  const std::size_t in = feature_dim_ + (conditioned_ ? num_classes_ : 0);
  const bool want_dx = !dx.values.empty();
  if (kind_ == DataKind::static_vector) {
    std::vector<double> dinput(want_dx ? in : 0);
    dense_.backward(params, tape.dense, dlogits, grad, dinput);
    if (want_dx) std::copy_n(dinput.begin(), feature_dim_, dx.row(0).begin());
    return;
  }
  if (!want_dx) {
    gru_.backward_last(params, tape.gru, dlogits, grad, {});
    return;
  }
  const std::size_t steps = tape.gru.steps.size();
  nn::Matrix dinput(steps, in);
  gru_.backward_last(params, tape.gru, dlogits, grad, dinput.view());
  for (std::size_t t = 0; t < steps; ++t) {
    std::copy_n(dinput.row(t).begin(), feature_dim_, dx.row(t).begin());
  }
}

// --------------------------------------------------------------- ScganModel

ScganModel ScganModel::create(const ScganConfig& cfg, std::size_t feature_dim) {
  cfg.validate();
  ScganModel m;
  m.config_ = cfg;
  m.feature_dim_ = feature_dim;
  m.generator_ = Generator(cfg, feature_dim);
  m.discriminator_ = Discriminator(cfg, feature_dim);
  std::mt19937_64 rng(cfg.seed);
  m.g_params_ = nn::init_parameters(m.generator_.layout(), rng, cfg.init_stddev);
  m.d_params_ = nn::init_parameters(m.discriminator_.layout(), rng, cfg.init_stddev);
  return m;
}

ScganModel ScganModel::from_parameters(const ScganConfig& cfg, std::size_t feature_dim,
                                       std::vector<double> generator_params,
                                       std::vector<double> discriminator_params) {
  cfg.validate();
  ScganModel m;
  m.config_ = cfg;
  m.feature_dim_ = feature_dim;
  m.generator_ = Generator(cfg, feature_dim);
  m.discriminator_ = Discriminator(cfg, feature_dim);
  require_dims(generator_params.size() == m.generator_.layout().total(),
               "generator parameter count mismatch");
  require_dims(discriminator_params.size() == m.discriminator_.layout().total(),
               "discriminator parameter count mismatch");
  m.g_params_ = std::move(generator_params);
  m.d_params_ = std::move(discriminator_params);
  return m;
}

std::vector<double> ScganModel::generate_static(const LatentVector& z,
                                                const ConditionVector& c) const {
  if (config_.data_kind != DataKind::static_vector) {
    throw ValidationError("generate_static called on a sequence model");
  }
  auto out = generator_.forward(g_params_, z.z, c, 1);
  return {out.values().begin(), out.values().end()};
}

nn::Matrix ScganModel::generate_sequence(const LatentVector& z, const ConditionVector& c,
                                         std::size_t steps) const {
  if (config_.data_kind != DataKind::sequence) {
    throw ValidationError("generate_sequence called on a static-vector model");
  }
  return generator_.forward(g_params_, z.z, c, steps);
}

nn::Matrix ScganModel::generate(const LatentVector& z, const ConditionVector& c) const {
  return generator_.forward(g_params_, z.z, c, config_.sequence_length);
}

std::vector<double> ScganModel::discriminate(nn::ConstMatrixView x,
                                             std::optional<std::size_t> cls) const {
  return discriminator_.forward(d_params_, x, cls);
}

std::vector<double> ScganModel::discriminator_posteriors(nn::ConstMatrixView x,
                                                         std::optional<std::size_t> cls) const {
  return nn::softmax(discriminate(x, cls));
}

// ------------------------------------------------------------------ losses

double real_term(Mode mode, std::span<const double> logits, std::size_t label,
                 std::span<double> dlogits) {
  const std::size_t target = mode == Mode::cgan ? real_index_cgan() : label;
  if (mode != Mode::cgan && label + 1 >= logits.size()) {
    throw ValidationError("real label " + std::to_string(label) + " out of range");
  }
  return dlogits.empty() ? nn::softmax_cross_entropy(logits, target)
                         : nn::softmax_cross_entropy(logits, target, dlogits);
}

double fake_term(Mode mode, std::span<const double> logits, std::span<double> dlogits) {
  const std::size_t target = mode == Mode::cgan ? 1 : logits.size() - 1;
  return dlogits.empty() ? nn::softmax_cross_entropy(logits, target)
                         : nn::softmax_cross_entropy(logits, target, dlogits);
}

double generator_term(Mode mode, std::span<const double> logits, std::size_t condition,
                      std::span<double> dlogits) {
  switch (mode) {
    case Mode::scgan:
      if (condition + 1 >= logits.size()) {
        throw ValidationError("condition " + std::to_string(condition) + " out of range");
      }
      return dlogits.empty() ? nn::softmax_cross_entropy(logits, condition)
                             : nn::softmax_cross_entropy(logits, condition, dlogits);
    case Mode::cgan:
      return dlogits.empty() ? nn::softmax_cross_entropy(logits, real_index_cgan())
                             : nn::softmax_cross_entropy(logits, real_index_cgan(), dlogits);
    case Mode::sgan: {
      // -log sum_{k<K} p_k = lse(all) - lse(first K)
      const std::size_t k = logits.size() - 1;
      const auto real = logits.first(k);
      const double loss = nn::log_sum_exp(logits) - nn::log_sum_exp(real);
      if (!dlogits.empty()) {
        nn::softmax(logits, dlogits);
        std::vector<double> q(k);
        nn::softmax(real, q);
        for (std::size_t j = 0; j < k; ++j) dlogits[j] -= q[j];
      }
      return loss;
    }
  }
  return 0.0;
}

double discriminator_loss(Mode mode, const std::vector<std::vector<double>>& real_logits,
                          std::span<const std::size_t> labels,
                          const std::vector<std::vector<double>>& fake_logits) {
  require_dims(real_logits.size() == labels.size(), "discriminator loss: labels length mismatch");
  double real = 0.0, fake = 0.0;
  for (std::size_t i = 0; i < real_logits.size(); ++i) {
    real += real_term(mode, real_logits[i], labels[i], {});
  }
  for (const auto& l : fake_logits) fake += fake_term(mode, l, {});
  double loss = 0.0;
  if (!real_logits.empty()) loss += real / static_cast<double>(real_logits.size());
  if (!fake_logits.empty()) loss += fake / static_cast<double>(fake_logits.size());
  return loss;
}

double generator_loss(Mode mode, const std::vector<std::vector<double>>& fake_logits,
                      std::span<const std::size_t> conditions) {
  if (mode != Mode::sgan && conditions.size() != fake_logits.size()) {
    throw ValidationError("generator loss: conditions required for every fake sample");
  }
  if (fake_logits.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < fake_logits.size(); ++i) {
    const std::size_t c = conditions.empty() ? 0 : conditions[i];
    sum += generator_term(mode, fake_logits[i], c, {});
  }
  return sum / static_cast<double>(fake_logits.size());
}

namespace {

void check_labels(const ScganModel& m, std::span<const std::size_t> labels) {
  for (std::size_t l : labels) {
    if (l >= m.config().num_classes) {
      throw ValidationError("label " + std::to_string(l) + " >= K=" +
                            std::to_string(m.config().num_classes));
    }
  }
}

std::optional<std::size_t> cond_for(const ScganModel& m, std::span<const std::size_t> c,
                                    std::size_t i) {
  if (m.config().mode != Mode::cgan) return std::nullopt;
  return c[i];
}

}  // namespace

double discriminator_loss(const ScganModel& model, const std::vector<nn::Matrix>& real,
                          std::span<const std::size_t> labels,
                          const std::vector<nn::Matrix>& fake,
                          std::span<const std::size_t> fake_conditions) {
  check_labels(model, labels);
  require_dims(real.size() == labels.size(), "discriminator loss: labels length mismatch");
  if (model.config().mode == Mode::cgan && fake_conditions.size() != fake.size()) {
    throw ValidationError("cgan discriminator loss needs a condition per fake sample");
  }
  std::vector<std::vector<double>> rl, fl;
  for (std::size_t i = 0; i < real.size(); ++i) {
    rl.push_back(model.discriminate(real[i].view(), cond_for(model, labels, i)));
  }
  for (std::size_t i = 0; i < fake.size(); ++i) {
    fl.push_back(model.discriminate(fake[i].view(), cond_for(model, fake_conditions, i)));
  }
  return discriminator_loss(model.config().mode, rl, labels, fl);
}

double generator_loss(const ScganModel& model, const std::vector<nn::Matrix>& fake,
                      std::span<const std::size_t> conditions) {
  const Mode mode = model.config().mode;
  if (mode != Mode::sgan && conditions.size() != fake.size()) {
    throw ValidationError("generator loss: conditions required in scgan/cgan mode");
  }
  check_labels(model, conditions);
  std::vector<std::vector<double>> fl;
  for (std::size_t i = 0; i < fake.size(); ++i) {
    fl.push_back(model.discriminate(fake[i].view(), cond_for(model, conditions, i)));
  }
  return generator_loss(mode, fl, conditions);
}

}  // namespace scgan::gan
