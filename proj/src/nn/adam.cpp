#include "scgan/nn/adam.h"

#include <cmath>

#include "scgan/error.h"

namespace scgan::nn {

AdamState AdamState::for_size(std::size_t n) {
  AdamState s;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  return s;
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                 double lr) {
  require_dims(params.size() == grads.size(), "adam: parameter/gradient size mismatch");
  require_dims(state.m.size() == params.size() && state.v.size() == params.size(),
               "adam: moment accumulators do not match parameters");
  for (double g : grads) {
    if (!std::isfinite(g)) throw DivergenceError("adam: non-finite gradient", state.step);
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                 double lr, double l2, const ParameterLayout& layout) {
  std::vector<double> folded(grads.begin(), grads.end());
  layout.add_l2_gradient(params, folded, l2);
  adam_update(params, folded, state, lr);
}

}  // namespace scgan::nn
