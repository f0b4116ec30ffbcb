#pragma once

#include <vector>

#include "geoat/tensor.hpp"

namespace geoat::nn {

struct AdamWConfig {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Per-parameter first/second moment buffers plus the step count.
struct AdamWState {
  long step = 0;
  std::vector<Eigen::ArrayXd> m;
  std::vector<Eigen::ArrayXd> v;
};

/// One decoupled-weight-decay Adam update. Moment buffers are created on the
/// first call, shaped like their parameters; ShapeMismatch on any
/// inconsistency afterwards. Deterministic given inputs.
void adamw_step(AdamWState& state, const AdamWConfig& cfg, std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads);

}  // namespace geoat::nn
