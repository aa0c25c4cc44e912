#pragma once

#include <cstdint>
#include <vector>

#include "gridlang/tensor.hpp"

namespace gridlang {

struct AmsgradConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First moment, second moment, and the running elementwise max of the
// second moment, per parameter block. The running max never decreases.
struct AmsgradState {
  std::vector<Tensor> m, v, v_hat;
  int64_t step = 0;

  static AmsgradState for_params(const std::vector<const Tensor*>& params);
};

// One AMSGrad step with bias correction; matches the standard Adam-with-max
// update rule. Throws on shape mismatch.
void amsgrad_update(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                    AmsgradState& state, const AmsgradConfig& config);

}  // namespace gridlang
