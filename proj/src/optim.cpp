#include "geoat/optim.hpp"

#include <cmath>

namespace geoat::nn {

void adamw_step(AdamWState& state, const AdamWConfig& cfg, std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size()) {
    throw ShapeMismatch("adamw_step: " + std::to_string(params.size()) + " params vs " +
                        std::to_string(grads.size()) + " grads");
  }
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      state.m[i] = Eigen::ArrayXd::Zero(params[i]->numel());
      state.v[i] = Eigen::ArrayXd::Zero(params[i]->numel());
    }
  }
  if (state.m.size() != params.size()) {
    throw ShapeMismatch("adamw_step: state tracks a different parameter count");
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, (double)state.step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, (double)state.step);

  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    if (p.shape != g.shape || state.m[i].size() != p.numel()) {
      throw ShapeMismatch("adamw_step: parameter " + std::to_string(i) + " shape " +
                          shape_str(p.shape) + " vs grad " + shape_str(g.shape));
    }
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g.data;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.data.square();
    const Eigen::ArrayXd m_hat = m / bc1;
    const Eigen::ArrayXd v_hat = v / bc2;
    p.data -= cfg.lr * (m_hat / (v_hat.sqrt() + cfg.eps) + cfg.weight_decay * p.data);
  }
}

}  // namespace geoat::nn
