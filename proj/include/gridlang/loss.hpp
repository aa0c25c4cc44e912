#pragma once

#include <span>
#include <vector>

namespace gridlang {

double log_sum_exp(std::span<const double> logits);

// out may alias logits.
void softmax(std::span<const double> logits, std::span<double> out);

// -log softmax(logits)[target]. Throws std::out_of_range on a bad target.
double softmax_nll(std::span<const double> logits, int target);

// Also writes scale * (softmax(logits) - onehot(target)) into dlogits
// (accumulating), returning scale * loss.
double softmax_nll_grad(std::span<const double> logits, int target, double scale,
                        std::span<double> dlogits);

}  // namespace gridlang
