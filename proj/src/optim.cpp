#include "gridlang/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace gridlang {

AmsgradState AmsgradState::for_params(const std::vector<const Tensor*>& params) {
  AmsgradState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  state.v_hat.reserve(params.size());
  for (const Tensor* p : params) {
    state.m.push_back(Tensor::zeros(p->shape));
    state.v.push_back(Tensor::zeros(p->shape));
    state.v_hat.push_back(Tensor::zeros(p->shape));
  }
  return state;
}

void amsgrad_update(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                    AmsgradState& state, const AmsgradConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("amsgrad: parameter/gradient/state count mismatch");
  }
  state.step += 1;
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  const double step_size = config.lr / bias1;
  const double inv_sqrt_bias2 = 1.0 / std::sqrt(bias2);
  for (size_t b = 0; b < params.size(); ++b) {
    Tensor& p = *params[b];
    const Tensor& g = *grads[b];
    if (!same_shape(p, g) || !same_shape(p, state.m[b])) {
      throw std::invalid_argument("amsgrad: shape mismatch");
    }
    double* m = state.m[b].v.data();
    double* v = state.v[b].v.data();
    double* v_hat = state.v_hat[b].v.data();
    const double* gv = g.v.data();
    double* pv = p.v.data();
    const size_t n = p.v.size();
    for (size_t i = 0; i < n; ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gv[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gv[i] * gv[i];
      v_hat[i] = std::max(v_hat[i], v[i]);
      pv[i] -= step_size * m[i] / (std::sqrt(v_hat[i]) * inv_sqrt_bias2 + config.eps);
    }
  }
}

}  // namespace gridlang
