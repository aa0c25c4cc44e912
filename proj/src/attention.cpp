#include "gridlang/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace gridlang {

AttentionParams AttentionParams::create(int d_h, int d_a) {
  AttentionParams p;
  p.w_query = Tensor::zeros({d_a, d_h});
  p.w_keys = Tensor::zeros({d_a, d_h});
  p.score_v = Tensor::zeros({d_a});
  return p;
}

void AttentionCache::reset(int L, int new_d_h, int new_d_a) {
  num_states = L;
  d_h = new_d_h;
  d_a = new_d_a;
  query_proj.assign(d_a, 0.0);
  tanh_pre.assign(static_cast<size_t>(L) * d_a, 0.0);
  scores.assign(L, 0.0);
  weights.assign(L, 0.0);
  context.assign(d_h, 0.0);
}

void attention_forward(const AttentionParams& p, const double* query, const double* states, int L,
                       AttentionCache& cache) {
  if (L < 1) throw std::invalid_argument("attention needs at least one encoder state");
  const int d_h = p.w_query.cols();
  const int d_a = p.dim();
  cache.reset(L, d_h, d_a);
  matvec(p.w_query, query, cache.query_proj.data(), false);
  double max_score = -1e300;
  for (int j = 0; j < L; ++j) {
    double* tp = cache.tanh_pre.data() + static_cast<size_t>(j) * d_a;
    matvec(p.w_keys, states + static_cast<size_t>(j) * d_h, tp, false);
    double score = 0.0;
    for (int a = 0; a < d_a; ++a) {
      tp[a] = std::tanh(tp[a] + cache.query_proj[a]);
      score += p.score_v.v[a] * tp[a];
    }
    cache.scores[j] = score;
    max_score = std::max(max_score, score);
  }
  double z = 0.0;
  for (int j = 0; j < L; ++j) {
    cache.weights[j] = std::exp(cache.scores[j] - max_score);
    z += cache.weights[j];
  }
  for (int j = 0; j < L; ++j) cache.weights[j] /= z;
  std::fill(cache.context.begin(), cache.context.end(), 0.0);
  for (int j = 0; j < L; ++j) {
    const double w = cache.weights[j];
    const double* s = states + static_cast<size_t>(j) * d_h;
    for (int i = 0; i < d_h; ++i) cache.context[i] += w * s[i];
  }
}

void attention_backward(const AttentionParams& p, const double* query, const double* states,
                        const AttentionCache& cache, const double* dcontext,
                        AttentionParams& grads, double* dquery, double* dstates) {
  const int L = cache.num_states;
  const int d_h = cache.d_h;
  const int d_a = cache.d_a;

  thread_local std::vector<double> dweights, dscores, dpre, dquery_proj;
  dweights.assign(L, 0.0);
  dscores.assign(L, 0.0);
  dpre.assign(d_a, 0.0);
  dquery_proj.assign(d_a, 0.0);

  // context = sum_j w_j s_j
  for (int j = 0; j < L; ++j) {
    const double* s = states + static_cast<size_t>(j) * d_h;
    double acc = 0.0;
    for (int i = 0; i < d_h; ++i) {
      acc += s[i] * dcontext[i];
      dstates[static_cast<size_t>(j) * d_h + i] += cache.weights[j] * dcontext[i];
    }
    dweights[j] = acc;
  }
  // softmax jacobian
  double weighted = 0.0;
  for (int j = 0; j < L; ++j) weighted += cache.weights[j] * dweights[j];
  for (int j = 0; j < L; ++j) dscores[j] = cache.weights[j] * (dweights[j] - weighted);
  // score_j = v . tanh(Wk s_j + Wq q)
  for (int j = 0; j < L; ++j) {
    const double ds = dscores[j];
    if (ds == 0.0) continue;
    const double* tp = cache.tanh_pre.data() + static_cast<size_t>(j) * d_a;
    for (int a = 0; a < d_a; ++a) {
      grads.score_v.v[a] += ds * tp[a];
      dpre[a] = ds * p.score_v.v[a] * (1.0 - tp[a] * tp[a]);
      dquery_proj[a] += dpre[a];
    }
    add_outer(grads.w_keys, dpre.data(), states + static_cast<size_t>(j) * d_h);
    matvec_transposed(p.w_keys, dpre.data(), dstates + static_cast<size_t>(j) * d_h, true);
  }
  add_outer(grads.w_query, dquery_proj.data(), query);
  matvec_transposed(p.w_query, dquery_proj.data(), dquery, true);
}

std::pair<std::vector<double>, std::vector<double>> additive_attention(
    const AttentionParams& p, std::span<const double> query,
    const std::vector<std::vector<double>>& encoder_states) {
  if (encoder_states.empty()) {
    throw std::invalid_argument("attention needs at least one encoder state");
  }
  const int d_h = p.w_query.cols();
  const int L = static_cast<int>(encoder_states.size());
  std::vector<double> flat(static_cast<size_t>(L) * d_h);
  for (int j = 0; j < L; ++j) {
    if (static_cast<int>(encoder_states[j].size()) != d_h) {
      throw std::invalid_argument("encoder state dimension mismatch");
    }
    std::copy(encoder_states[j].begin(), encoder_states[j].end(),
              flat.begin() + static_cast<size_t>(j) * d_h);
  }
  AttentionCache cache;
  attention_forward(p, query.data(), flat.data(), L, cache);
  return {cache.context, cache.weights};
}

}  // namespace gridlang
