#include "scgan/nn/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scgan/error.h"

namespace scgan::nn {

namespace {

// y += W x
void gemv_acc(const ConstMatrixView& w, std::span<const double> x, std::span<double> y) {
  const std::size_t cols = w.cols;
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* row = w.values.data() + r * cols;
    // Four interleaved partial sums in a fixed order: vectorizable and
    // still deterministic.
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      a0 += row[c] * x[c];
      a1 += row[c + 1] * x[c + 1];
      a2 += row[c + 2] * x[c + 2];
      a3 += row[c + 3] * x[c + 3];
    }
    for (; c < cols; ++c) a0 += row[c] * x[c];
    y[r] += (a0 + a1) + (a2 + a3);
  }
}

// y += W^T v
void gemv_t_acc(const ConstMatrixView& w, std::span<const double> v, std::span<double> y) {
  const std::size_t cols = w.cols;
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* row = w.values.data() + r * cols;
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * vr;
  }
}

// G += v x^T
void outer_acc(const MatrixView& g, std::span<const double> v, std::span<const double> x) {
  const std::size_t cols = g.cols;
  for (std::size_t r = 0; r < g.rows; ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    double* row = g.values.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += vr * x[c];
  }
}

}  // namespace

const char* to_string(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "linear";
}

Activation activation_from_string(const std::string& s) {
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  if (s == "linear") return Activation::linear;
  if (s == "softmax") return Activation::softmax;
  throw ValidationError("unknown activation '" + s + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> dense_forward(std::span<const double> x, const DenseLayerParams& layer) {
  require_dims(layer.bias.size() == layer.weight.rows(),
               "dense layer: bias length " + std::to_string(layer.bias.size()) +
                   " != weight rows " + std::to_string(layer.weight.rows()));
  require_dims(x.size() == layer.weight.cols(),
               "dense layer: input length " + std::to_string(x.size()) + " != weight cols " +
                   std::to_string(layer.weight.cols()));
  std::vector<double> y(layer.weight.rows());
  dense_forward(layer.ref(), x, y);
  return y;
}

void dense_forward(const DenseRef& layer, std::span<const double> x, std::span<double> y) {
  std::copy(layer.bias.begin(), layer.bias.end(), y.begin());
  gemv_acc(layer.weight, x, y);
  switch (layer.activation) {
    case Activation::sigmoid:
      for (double& v : y) v = sigmoid(v);
      break;
    case Activation::tanh:
      for (double& v : y) v = std::tanh(v);
      break;
    case Activation::linear:
      break;
    case Activation::softmax:
      softmax(std::span<const double>(y.data(), y.size()), y);
      break;
  }
}

void dense_backward(const DenseRef& layer, std::span<const double> x, std::span<const double> y,
                    std::span<const double> dy, const DenseGradRef& grad, std::span<double> dx) {
  const std::size_t out = y.size();
  std::vector<double> da(out);
  switch (layer.activation) {
    case Activation::sigmoid:
      for (std::size_t i = 0; i < out; ++i) da[i] = dy[i] * y[i] * (1.0 - y[i]);
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < out; ++i) da[i] = dy[i] * (1.0 - y[i] * y[i]);
      break;
    case Activation::linear:
      std::copy(dy.begin(), dy.end(), da.begin());
      break;
    case Activation::softmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < out; ++i) dot += dy[i] * y[i];
      for (std::size_t i = 0; i < out; ++i) da[i] = y[i] * (dy[i] - dot);
      break;
    }
  }
  outer_acc(grad.weight, da, x);
  for (std::size_t i = 0; i < out; ++i) grad.bias[i] += da[i];
  if (!dx.empty()) {
    std::fill(dx.begin(), dx.end(), 0.0);
    gemv_t_acc(layer.weight, da, dx);
  }
}

GruCellParams GruCellParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  GruCellParams p;
  for (std::size_t g = 0; g < 3; ++g) {
    p.input[g] = Matrix(hidden_size, input_size);
    p.recurrent[g] = Matrix(hidden_size, hidden_size);
    p.bias[g].assign(hidden_size, 0.0);
  }
  return p;
}

void GruCellParams::validate() const {
  const std::size_t hidden = input[0].rows();
  const std::size_t in = input[0].cols();
  for (std::size_t g = 0; g < 3; ++g) {
    require_dims(input[g].rows() == hidden && input[g].cols() == in,
                 "GRU: input weight blocks disagree in shape");
    require_dims(recurrent[g].rows() == hidden && recurrent[g].cols() == hidden,
                 "GRU: recurrent weight block must be hidden x hidden");
    require_dims(bias[g].size() == hidden, "GRU: gate bias length != hidden size");
  }
}

GruRef GruCellParams::ref() const {
  GruRef r;
  for (std::size_t g = 0; g < 3; ++g) {
    r.input[g] = input[g].view();
    r.recurrent[g] = recurrent[g].view();
    r.bias[g] = bias[g];
  }
  return r;
}

std::vector<double> gru_step(std::span<const double> x, std::span<const double> h_prev,
                             const GruCellParams& p) {
  p.validate();
  require_dims(x.size() == p.input[0].cols(), "GRU: input length " + std::to_string(x.size()) +
                                                  " != " + std::to_string(p.input[0].cols()));
  require_dims(h_prev.size() == p.input[0].rows(), "GRU: hidden state length mismatch");
  GruStepCache cache;
  gru_step_forward(p.ref(), x, h_prev, cache);
  return cache.h;
}

void gru_step_forward(const GruRef& p, std::span<const double> x, std::span<const double> h_prev,
                      GruStepCache& c) {
  const std::size_t hidden = p.hidden_size();
  c.x.assign(x.begin(), x.end());
  c.h_prev.assign(h_prev.begin(), h_prev.end());
  c.z.assign(p.bias[kUpdate].begin(), p.bias[kUpdate].end());
  c.r.assign(p.bias[kReset].begin(), p.bias[kReset].end());
  c.candidate.assign(p.bias[kCandidate].begin(), p.bias[kCandidate].end());
  c.reset_hidden.resize(hidden);
  c.h.resize(hidden);

  gemv_acc(p.input[kUpdate], x, c.z);
  gemv_acc(p.recurrent[kUpdate], h_prev, c.z);
  gemv_acc(p.input[kReset], x, c.r);
  gemv_acc(p.recurrent[kReset], h_prev, c.r);
  for (std::size_t i = 0; i < hidden; ++i) {
    c.z[i] = sigmoid(c.z[i]);
    c.r[i] = sigmoid(c.r[i]);
    c.reset_hidden[i] = c.r[i] * h_prev[i];
  }
  gemv_acc(p.input[kCandidate], x, c.candidate);
  gemv_acc(p.recurrent[kCandidate], c.reset_hidden, c.candidate);
  for (std::size_t i = 0; i < hidden; ++i) {
    c.candidate[i] = std::tanh(c.candidate[i]);
    c.h[i] = (1.0 - c.z[i]) * h_prev[i] + c.z[i] * c.candidate[i];
  }
}

void gru_step_backward(const GruRef& p, const GruStepCache& c, std::span<const double> dh,
                       const GruGradRef& grad, std::span<double> dx, std::span<double> dh_prev) {
  const std::size_t hidden = p.hidden_size();
  std::vector<double> da_z(hidden), da_r(hidden), da_h(hidden), d_reset_hidden(hidden, 0.0);

  for (std::size_t i = 0; i < hidden; ++i) {
    const double dz = dh[i] * (c.candidate[i] - c.h_prev[i]);
    const double dcand = dh[i] * c.z[i];
    da_z[i] = dz * c.z[i] * (1.0 - c.z[i]);
    da_h[i] = dcand * (1.0 - c.candidate[i] * c.candidate[i]);
  }
  gemv_t_acc(p.recurrent[kCandidate], da_h, d_reset_hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    const double dr = d_reset_hidden[i] * c.h_prev[i];
    da_r[i] = dr * c.r[i] * (1.0 - c.r[i]);
  }

  outer_acc(grad.input[kUpdate], da_z, c.x);
  outer_acc(grad.input[kReset], da_r, c.x);
  outer_acc(grad.input[kCandidate], da_h, c.x);
  outer_acc(grad.recurrent[kUpdate], da_z, c.h_prev);
  outer_acc(grad.recurrent[kReset], da_r, c.h_prev);
  outer_acc(grad.recurrent[kCandidate], da_h, c.reset_hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    grad.bias[kUpdate][i] += da_z[i];
    grad.bias[kReset][i] += da_r[i];
    grad.bias[kCandidate][i] += da_h[i];
  }

  if (!dx.empty()) {
    std::fill(dx.begin(), dx.end(), 0.0);
    gemv_t_acc(p.input[kUpdate], da_z, dx);
    gemv_t_acc(p.input[kReset], da_r, dx);
    gemv_t_acc(p.input[kCandidate], da_h, dx);
  }
  if (!dh_prev.empty()) {
    for (std::size_t i = 0; i < hidden; ++i) {
      dh_prev[i] = dh[i] * (1.0 - c.z[i]) + d_reset_hidden[i] * c.r[i];
    }
    gemv_t_acc(p.recurrent[kUpdate], da_z, dh_prev);
    gemv_t_acc(p.recurrent[kReset], da_r, dh_prev);
  }
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void softmax(std::span<const double> logits, std::span<double> out) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : logits) m = std::max(m, x);
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= s;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  softmax(logits, out);
  return out;
}

double softmax_cross_entropy(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw ValidationError("cross-entropy target " + std::to_string(target) +
                          " out of range for " + std::to_string(logits.size()) + " logits");
  }
  return log_sum_exp(logits) - logits[target];
}

double softmax_cross_entropy(std::span<const double> logits, std::size_t target,
                             std::span<double> dlogits) {
  const double loss = softmax_cross_entropy(logits, target);
  softmax(logits, dlogits);
  dlogits[target] -= 1.0;
  return loss;
}

}  // namespace scgan::nn
