#pragma once

#include <string>
#include <vector>

#include "gridlang/tensor.hpp"

namespace gridlang {

// Additive (concat) attention: score(q, k_j) = v . tanh(Wq q + Wk k_j),
// weights = softmax(scores), context = sum_j weights_j k_j. The score space
// has the same dimensionality as the hidden state.
struct AttentionParams {
  Tensor w_query;  // d_a x d_h
  Tensor w_keys;   // d_a x d_h
  Tensor score_v;  // d_a

  static AttentionParams create(int d_h, int d_a);
  int dim() const { return score_v.rows(); }
  bool empty() const { return score_v.v.empty(); }
};

struct AttentionCache {
  int num_states = 0;
  int d_h = 0;
  int d_a = 0;
  std::vector<double> query_proj;  // d_a
  std::vector<double> tanh_pre;    // L x d_a
  std::vector<double> scores;      // L
  std::vector<double> weights;     // L
  std::vector<double> context;     // d_h

  void reset(int L, int new_d_h, int new_d_a);
};

// states is an L x d_h row-major block. Throws if L == 0.
void attention_forward(const AttentionParams& p, const double* query, const double* states, int L,
                       AttentionCache& cache);

// dcontext is d_h. dquery accumulates; dstates accumulates into L x d_h.
void attention_backward(const AttentionParams& p, const double* query, const double* states,
                        const AttentionCache& cache, const double* dcontext,
                        AttentionParams& grads, double* dquery, double* dstates);

// Spec-facing helper: returns (context, weights).
std::pair<std::vector<double>, std::vector<double>> additive_attention(
    const AttentionParams& p, std::span<const double> query,
    const std::vector<std::vector<double>>& encoder_states);

template <typename F>
void for_each_tensor(AttentionParams& p, const std::string& prefix, F&& f) {
  f(prefix + ".w_query", p.w_query);
  f(prefix + ".w_keys", p.w_keys);
  f(prefix + ".score_v", p.score_v);
}

}  // namespace gridlang
