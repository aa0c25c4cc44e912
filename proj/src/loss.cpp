#include "gridlang/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace gridlang {

double log_sum_exp(std::span<const double> logits) {
  double max_logit = -1e300;
  for (double x : logits) max_logit = std::max(max_logit, x);
  double acc = 0.0;
  for (double x : logits) acc += std::exp(x - max_logit);
  return max_logit + std::log(acc);
}

void softmax(std::span<const double> logits, std::span<double> out) {
  const double lse = log_sum_exp(logits);
  for (size_t i = 0; i < logits.size(); ++i) out[i] = std::exp(logits[i] - lse);
}

double softmax_nll(std::span<const double> logits, int target) {
  if (target < 0 || target >= static_cast<int>(logits.size())) {
    throw std::out_of_range("nll target out of range");
  }
  return log_sum_exp(logits) - logits[target];
}

double softmax_nll_grad(std::span<const double> logits, int target, double scale,
                        std::span<double> dlogits) {
  if (target < 0 || target >= static_cast<int>(logits.size())) {
    throw std::out_of_range("nll target out of range");
  }
  const double lse = log_sum_exp(logits);
  for (size_t i = 0; i < logits.size(); ++i) {
    dlogits[i] += scale * std::exp(logits[i] - lse);
  }
  dlogits[target] -= scale;
  return scale * (lse - logits[target]);
}

}  // namespace gridlang
