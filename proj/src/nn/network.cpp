#include "scgan/nn/network.h"

#include <algorithm>
#include <cmath>

#include "scgan/error.h"

namespace scgan::nn {

std::vector<double> init_parameters(const ParameterLayout& layout, std::mt19937_64& rng,
                                    double stddev) {
  std::vector<double> params(layout.total(), 0.0);
  std::normal_distribution<double> gauss(0.0, stddev);
  for (const auto& s : layout.slots()) {
    if (!s.decays) continue;
    for (std::size_t k = s.offset; k < s.offset + s.size(); ++k) params[k] = gauss(rng);
  }
  return params;
}

DenseNet::DenseNet(std::vector<std::size_t> sizes, Activation hidden, Activation output)
    : sizes_(std::move(sizes)), hidden_(hidden), output_(output) {
  if (sizes_.size() < 2) throw ValidationError("DenseNet needs at least input and output sizes");
  for (std::size_t s : sizes_) {
    if (s == 0) throw ValidationError("DenseNet layer sizes must be positive");
  }
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const std::string base = "dense" + std::to_string(i);
    weight_slot_.push_back(layout_.add(base + ".weight", sizes_[i + 1], sizes_[i], true));
    bias_slot_.push_back(layout_.add(base + ".bias", 1, sizes_[i + 1], false));
  }
}

DenseRef DenseNet::layer(std::span<const double> params, std::size_t i) const {
  const Activation act = (i + 1 == num_layers()) ? output_ : hidden_;
  return {layout_.view(params, weight_slot_[i]), layout_.view(params, bias_slot_[i]).values, act};
}

DenseGradRef DenseNet::layer_grad(std::span<double> grad, std::size_t i) const {
  return {layout_.view(grad, weight_slot_[i]), layout_.view(grad, bias_slot_[i]).values};
}

void DenseNet::forward(std::span<const double> params, std::span<const double> x,
                       Tape& tape) const {
  require_dims(x.size() == input_size(), "DenseNet: input length " + std::to_string(x.size()) +
                                             " != " + std::to_string(input_size()));
  tape.activations.resize(sizes_.size());
  tape.activations[0].assign(x.begin(), x.end());
  for (std::size_t i = 0; i < num_layers(); ++i) {
    tape.activations[i + 1].resize(sizes_[i + 1]);
    dense_forward(layer(params, i), tape.activations[i], tape.activations[i + 1]);
  }
}

std::vector<double> DenseNet::forward(std::span<const double> params,
                                      std::span<const double> x) const {
  Tape tape;
  forward(params, x, tape);
  return std::move(tape.activations.back());
}

void DenseNet::backward(std::span<const double> params, const Tape& tape,
                        std::span<const double> dout, std::span<double> grad,
                        std::span<double> dx) const {
  std::vector<double> delta(dout.begin(), dout.end());
  std::vector<double> below;
  for (std::size_t i = num_layers(); i-- > 0;) {
    const bool need_dx = i > 0 || !dx.empty();
    below.assign(need_dx ? sizes_[i] : 0, 0.0);
    dense_backward(layer(params, i), tape.activations[i], tape.activations[i + 1], delta,
                   layer_grad(grad, i), below);
    delta.swap(below);
  }
  if (!dx.empty()) std::copy(delta.begin(), delta.end(), dx.begin());
}

GruNet::GruNet(std::size_t input_size, std::size_t hidden_size, std::size_t layers,
               std::size_t head_size, Activation head_activation)
    : input_(input_size),
      hidden_(hidden_size),
      layers_(layers),
      head_(head_size),
      head_act_(head_activation) {
  if (input_ == 0 || hidden_ == 0 || layers_ == 0 || head_ == 0) {
    throw ValidationError("GruNet sizes must be positive");
  }
  static constexpr const char* kGate[3] = {"update", "reset", "candidate"};
  for (std::size_t l = 0; l < layers_; ++l) {
    const std::size_t in = l == 0 ? input_ : hidden_;
    const std::string base = "gru" + std::to_string(l) + ".";
    CellSlots s{};
    for (std::size_t g = 0; g < 3; ++g) {
      s.input[g] = layout_.add(base + kGate[g] + ".input", hidden_, in, true);
      s.recurrent[g] = layout_.add(base + kGate[g] + ".recurrent", hidden_, hidden_, true);
      s.bias[g] = layout_.add(base + kGate[g] + ".bias", 1, hidden_, false);
    }
    cells_.push_back(s);
  }
  head_weight_ = layout_.add("head.weight", head_, hidden_, true);
  head_bias_ = layout_.add("head.bias", 1, head_, false);
}

GruRef GruNet::cell(std::span<const double> params, std::size_t layer) const {
  const auto& s = cells_[layer];
  GruRef r;
  for (std::size_t g = 0; g < 3; ++g) {
    r.input[g] = layout_.view(params, s.input[g]);
    r.recurrent[g] = layout_.view(params, s.recurrent[g]);
    r.bias[g] = layout_.view(params, s.bias[g]).values;
  }
  return r;
}

GruGradRef GruNet::cell_grad(std::span<double> grad, std::size_t layer) const {
  const auto& s = cells_[layer];
  GruGradRef r;
  for (std::size_t g = 0; g < 3; ++g) {
    r.input[g] = layout_.view(grad, s.input[g]);
    r.recurrent[g] = layout_.view(grad, s.recurrent[g]);
    r.bias[g] = layout_.view(grad, s.bias[g]).values;
  }
  return r;
}

DenseRef GruNet::head(std::span<const double> params) const {
  return {layout_.view(params, head_weight_), layout_.view(params, head_bias_).values, head_act_};
}

DenseGradRef GruNet::head_grad(std::span<double> grad) const {
  return {layout_.view(grad, head_weight_), layout_.view(grad, head_bias_).values};
}

void GruNet::reset(Tape& tape) const {
  tape.steps.clear();
  tape.state.assign(layers_, std::vector<double>(hidden_, 0.0));
}

std::span<const double> GruNet::step(std::span<const double> params, std::span<const double> x,
                                     Tape& tape) const {
  require_dims(x.size() == input_, "GruNet: step input length " + std::to_string(x.size()) +
                                       " != " + std::to_string(input_));
  if (tape.state.size() != layers_) reset(tape);
  auto& caches = tape.steps.emplace_back(layers_);
  std::span<const double> in = x;
  for (std::size_t l = 0; l < layers_; ++l) {
    gru_step_forward(cell(params, l), in, tape.state[l], caches[l]);
    tape.state[l] = caches[l].h;
    in = caches[l].h;
  }
  return tape.state.back();
}

std::vector<double> GruNet::forward_last(std::span<const double> params, ConstMatrixView seq,
                                         Tape& tape) const {
  require_dims(seq.cols == input_, "GruNet: sequence width " + std::to_string(seq.cols) +
                                       " != " + std::to_string(input_));
  require_dims(seq.rows > 0, "GruNet: empty sequence");
  reset(tape);
  for (std::size_t t = 0; t < seq.rows; ++t) step(params, seq.row(t), tape);
  std::vector<double> out(head_);
  dense_forward(head(params), tape.state.back(), out);
  return out;
}

std::vector<double> GruNet::forward_last(std::span<const double> params,
                                         ConstMatrixView seq) const {
  Tape tape;
  return forward_last(params, seq, tape);
}

void GruNet::backward(std::span<const double> params, const Tape& tape,
                      const TopGradFn& top_grad, std::span<double> grad, MatrixView dx) const {
  const std::size_t steps = tape.steps.size();
  std::vector<std::vector<double>> carry(layers_, std::vector<double>(hidden_, 0.0));
  std::vector<double> dtop(hidden_), dh(hidden_), dh_prev(hidden_);
  std::vector<double> from_above, dx_next;
  for (std::size_t t = steps; t-- > 0;) {
    std::fill(dtop.begin(), dtop.end(), 0.0);
    top_grad(t, dx_next, dtop);
    from_above = dtop;
    for (std::size_t l = layers_; l-- > 0;) {
      for (std::size_t i = 0; i < hidden_; ++i) dh[i] = from_above[i] + carry[l][i];
      const std::size_t in = l == 0 ? input_ : hidden_;
      std::vector<double> dx_l(in);
      gru_step_backward(cell(params, l), tape.steps[t][l], dh, cell_grad(grad, l), dx_l,
                        dh_prev);
      carry[l] = dh_prev;
      from_above = std::move(dx_l);
    }
    dx_next = from_above;
    if (!dx.values.empty()) std::copy(dx_next.begin(), dx_next.end(), dx.row(t).begin());
  }
}

void GruNet::backward_last(std::span<const double> params, const Tape& tape,
                           std::span<const double> dhead, std::span<double> grad,
                           MatrixView dx) const {
  const std::size_t last = tape.steps.size() - 1;
  const auto& top = tape.steps[last][layers_ - 1].h;
  std::vector<double> head_out(head_);
  dense_forward(head(params), top, head_out);
  std::vector<double> dtop_last(hidden_);
  dense_backward(head(params), top, head_out, dhead, head_grad(grad), dtop_last);
  backward(
      params, tape,
      [&](std::size_t t, std::span<const double>, std::span<double> dtop) {
        if (t == last) std::copy(dtop_last.begin(), dtop_last.end(), dtop.begin());
      },
      grad, dx);
}

namespace {

void check_finite(double loss) {
  if (!std::isfinite(loss)) throw DivergenceError("non-finite classification loss", -1);
}

template <typename Net, typename Inputs, typename Item>
LossBreakdown classification_impl(const Net& net, std::span<const double> params,
                                  const Inputs& inputs, std::span<const std::size_t> targets,
                                  double l2, std::span<double> grad, parallel::Exec exec,
                                  Item&& item) {
  require_dims(inputs.size() == targets.size(), "classification: inputs/targets length mismatch");
  require_dims(!inputs.empty(), "classification: empty batch");
  require_dims(grad.size() == net.layout().total(), "classification: gradient buffer size");
  const double n = static_cast<double>(inputs.size());
  const double sum = parallel::accumulate_blocks(exec, inputs.size(), item, grad);
  for (double& g : grad) g /= n;
  net.layout().add_l2_gradient(params, grad, l2);
  LossBreakdown out{sum / n, l2 * net.layout().half_squared_norm(params)};
  check_finite(out.total());
  return out;
}

}  // namespace

LossBreakdown classification_backward(const DenseNet& net, std::span<const double> params,
                                      const std::vector<std::vector<double>>& inputs,
                                      std::span<const std::size_t> targets, double l2,
                                      std::span<double> grad, parallel::Exec exec) {
  return classification_impl(
      net, params, inputs, targets, l2, grad, exec,
      [&](std::size_t i, std::span<double> g) {
        DenseNet::Tape tape;
        net.forward(params, inputs[i], tape);
        std::vector<double> dlogits(net.output_size());
        const double loss = softmax_cross_entropy(tape.activations.back(), targets[i], dlogits);
        net.backward(params, tape, dlogits, g, {});
        return loss;
      });
}

LossBreakdown classification_loss(const DenseNet& net, std::span<const double> params,
                                  const std::vector<std::vector<double>>& inputs,
                                  std::span<const std::size_t> targets, double l2) {
  require_dims(inputs.size() == targets.size(), "classification: inputs/targets length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    sum += softmax_cross_entropy(net.forward(params, inputs[i]), targets[i]);
  }
  return {sum / static_cast<double>(inputs.size()), l2 * net.layout().half_squared_norm(params)};
}

LossBreakdown classification_backward(const GruNet& net, std::span<const double> params,
                                      const std::vector<Matrix>& sequences,
                                      std::span<const std::size_t> targets, double l2,
                                      std::span<double> grad, parallel::Exec exec) {
  return classification_impl(
      net, params, sequences, targets, l2, grad, exec,
      [&](std::size_t i, std::span<double> g) {
        GruNet::Tape tape;
        const auto logits = net.forward_last(params, sequences[i].view(), tape);
        std::vector<double> dlogits(logits.size());
        const double loss = softmax_cross_entropy(logits, targets[i], dlogits);
        net.backward_last(params, tape, dlogits, g, {});
        return loss;
      });
}

LossBreakdown classification_loss(const GruNet& net, std::span<const double> params,
                                  const std::vector<Matrix>& sequences,
                                  std::span<const std::size_t> targets, double l2) {
  require_dims(sequences.size() == targets.size(),
               "classification: inputs/targets length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    sum += softmax_cross_entropy(net.forward_last(params, sequences[i].view()), targets[i]);
  }
  return {sum / static_cast<double>(sequences.size()),
          l2 * net.layout().half_squared_norm(params)};
}

}  // namespace scgan::nn
