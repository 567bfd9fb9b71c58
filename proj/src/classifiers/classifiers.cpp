#include "scgan/classifiers/classifiers.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scgan/error.h"
#include "scgan/nn/adam.h"
#include "scgan/rng.h"

namespace scgan::classifiers {

Prediction argmax_prediction(std::vector<double> scores) {
  if (scores.empty()) throw ValidationError("prediction needs at least one score");
  Prediction p;
  p.cls = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                   scores.begin());
  p.scores = std::move(scores);
  return p;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("standardizer: no rows");
  const std::size_t d = rows.front().size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (const auto& r : rows) {
    require_dims(r.size() == d, "standardizer: ragged rows");
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : s.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) s.scale[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  require_dims(x.size() == mean.size(), "standardizer: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

std::vector<std::vector<double>> Standardizer::apply(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply(r));
  return out;
}

nn::ParameterLayout LinearSvmModel::layout() const {
  nn::ParameterLayout l;
  l.add("svm.weight", num_classes, dim, true);
  l.add("svm.bias", 1, num_classes, false);
  return l;
}

namespace {

struct BinaryResult {
  std::vector<double> w;  // d + 1, last entry is the bias
  std::vector<double> dual;
  double gap = 0.0;
  std::size_t epochs = 0;
};

double dot_aug(const std::vector<double>& w, const std::vector<double>& x) {
  double s = w.back();
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
  return s;
}

BinaryResult solve_binary(const std::vector<std::vector<double>>& X,
                          const std::vector<double>& y, const SvmParams& p,
                          std::uint64_t stream) {
  const std::size_t n = X.size(), d = X.front().size();
  BinaryResult r;
  r.w.assign(d + 1, 0.0);
  std::vector<double> alpha(n, 0.0), qii(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (double v : X[i]) s += v * v;
    qii[i] = s;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_rng(p.seed, stream);

  for (std::size_t epoch = 0; epoch < p.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const double g = y[i] * dot_aug(r.w, X[i]) - 1.0;
      const double a_new = std::clamp(alpha[i] - g / qii[i], 0.0, p.C);
      const double delta = (a_new - alpha[i]) * y[i];
      if (delta != 0.0) {
        for (std::size_t j = 0; j < d; ++j) r.w[j] += delta * X[i][j];
        r.w[d] += delta;
        alpha[i] = a_new;
      }
    }
    double wsq = 0.0;
    for (double v : r.w) wsq += v * v;
    double hinge = 0.0, asum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      hinge += std::max(0.0, 1.0 - y[i] * dot_aug(r.w, X[i]));
      asum += alpha[i];
    }
    const double primal = 0.5 * wsq + p.C * hinge;
    const double dual = asum - 0.5 * wsq;
    r.dual.push_back(dual);
    r.gap = (primal - dual) / std::max(std::abs(primal), 1e-12);
    r.epochs = epoch + 1;
    if (r.gap < p.tolerance) break;
  }
  return r;
}

}  // namespace

LinearSvmModel train_svm(const std::vector<std::vector<double>>& X,
                         std::span<const std::size_t> y, std::size_t K, const SvmParams& p,
                         SvmTrace* trace, parallel::Exec exec) {
  if (X.empty()) throw ValidationError("train_svm: no training rows");
  require_dims(X.size() == y.size(), "train_svm: label count mismatch");
  if (!(p.C > 0.0)) throw ValidationError("train_svm: C must be positive");
  const std::size_t d = X.front().size();
  std::vector<std::size_t> present(K, 0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    require_dims(X[i].size() == d, "train_svm: ragged rows");
    for (double v : X[i]) {
      if (!std::isfinite(v)) throw ValidationError("train_svm: non-finite feature");
    }
    if (y[i] >= K) throw ValidationError("train_svm: label out of range");
    ++present[y[i]];
  }
  if (std::count_if(present.begin(), present.end(), [](auto c) { return c > 0; }) < 2) {
    throw ValidationError("train_svm: need at least two classes");
  }

  std::vector<BinaryResult> res(K);
  parallel::for_each_index(exec, K, [&](std::size_t k) {
    std::vector<double> yk(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) yk[i] = y[i] == k ? 1.0 : -1.0;
    res[k] = solve_binary(X, yk, p, k);
  });

  LinearSvmModel m;
  m.num_classes = K;
  m.dim = d;
  m.C = p.C;
  m.weights = nn::Matrix(K, d);
  m.bias.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    std::copy_n(res[k].w.begin(), d, m.weights.row(k).begin());
    m.bias[k] = res[k].w[d];
  }
  if (trace) {
    for (auto& r : res) {
      trace->dual.push_back(r.dual);
      trace->gap.push_back(r.gap);
      trace->epochs.push_back(r.epochs);
    }
  }
  return m;
}

std::vector<double> svm_decision(const LinearSvmModel& m, std::span<const double> x) {
  require_dims(x.size() == m.dim, "svm: feature dimension " + std::to_string(x.size()) +
                                      " != " + std::to_string(m.dim));
  std::vector<double> s(m.num_classes);
  for (std::size_t k = 0; k < m.num_classes; ++k) {
    double v = m.bias[k];
    const auto w = m.weights.row(k);
    for (std::size_t j = 0; j < x.size(); ++j) v += w[j] * x[j];
    s[k] = v;
  }
  return s;
}

Prediction svm_predict(const LinearSvmModel& m, std::span<const double> x) {
  return argmax_prediction(svm_decision(m, x));
}

GruClassifierModel train_gru_classifier(const std::vector<nn::Matrix>& windows,
                                        std::span<const std::size_t> labels, std::size_t K,
                                        const GruClassifierConfig& cfg, parallel::Exec exec) {
  if (windows.empty()) throw ValidationError("gru classifier: no training windows");
  require_dims(windows.size() == labels.size(), "gru classifier: label count mismatch");
  const std::size_t T = windows.front().rows(), d = windows.front().cols();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    require_dims(windows[i].rows() == T && windows[i].cols() == d,
                 "gru classifier: windows must share one shape");
    if (labels[i] >= K) throw ValidationError("gru classifier: label out of range");
  }
  GruClassifierModel m;
  m.num_classes = K;
  m.net = nn::GruNet(d, cfg.hidden_size, cfg.layers, K);
  auto rng = make_rng(cfg.seed, 0);
  m.params = nn::init_parameters(m.net.layout(), rng, cfg.init_stddev);
  auto adam = nn::AdamState::for_size(m.params.size());

  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  const std::size_t B = std::min(cfg.batch_size, windows.size());
  std::vector<double> grad(m.params.size());
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    std::vector<nn::Matrix> batch;
    std::vector<std::size_t> targets;
    for (std::size_t b = 0; b < B; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(windows[order[cursor]]);
      targets.push_back(labels[order[cursor]]);
      ++cursor;
    }
    // classification_backward folds the L2 term into grad already.
    nn::classification_backward(m.net, m.params, batch, targets, cfg.l2, grad, exec);
    nn::adam_update(m.params, grad, adam, cfg.lr);
  }
  return m;
}

Prediction gru_predict(const GruClassifierModel& m, const nn::Matrix& window) {
  return argmax_prediction(nn::softmax(m.net.forward_last(m.params, window.view())));
}

Prediction vote(const std::vector<Prediction>& windows) {
  if (windows.empty()) throw ValidationError("vote: no windows");
  const std::size_t K = windows.front().scores.size();
  std::vector<std::size_t> votes(K, 0);
  std::vector<double> mass(K, 0.0);
  for (const auto& w : windows) {
    require_dims(w.scores.size() == K, "vote: score widths differ");
    ++votes[w.cls];
    for (std::size_t k = 0; k < K; ++k) mass[k] += w.scores[k];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (votes[k] > votes[best] || (votes[k] == votes[best] && mass[k] > mass[best])) best = k;
  }
  return {best, mass};
}

Prediction predict_recording(const GruClassifierModel& m, const std::vector<nn::Matrix>& windows) {
  if (windows.empty()) throw ValidationError("predict_recording: no windows");
  std::vector<Prediction> per;
  per.reserve(windows.size());
  for (const auto& w : windows) per.push_back(gru_predict(m, w));
  return vote(per);
}

}  // namespace scgan::classifiers
