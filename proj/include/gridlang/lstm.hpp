#pragma once

#include <string>
#include <vector>

#include "gridlang/tensor.hpp"

namespace gridlang {

// Single-layer LSTM cell with the standard sigmoid/tanh gate recurrence:
//   i = sigmoid(Wxi x + Whi h + bi)      f = sigmoid(Wxf x + Whf h + bf)
//   g = tanh   (Wxg x + Whg h + bg)      o = sigmoid(Wxo x + Who h + bo)
//   c' = f*c + i*g                        h' = o*tanh(c')
struct LstmParams {
  Tensor w_xi, w_hi, b_i;
  Tensor w_xf, w_hf, b_f;
  Tensor w_xg, w_hg, b_g;
  Tensor w_xo, w_ho, b_o;

  static LstmParams create(int input_size, int hidden_size);
  int input_size() const { return w_xi.cols(); }
  int hidden_size() const { return w_xi.rows(); }
};

// Flat per-step buffers for one sequence; reusable across sequences (the
// vectors keep their capacity).
struct LstmSequenceCache {
  int len = 0;
  int d_in = 0;
  int d_h = 0;
  std::vector<double> x, i, f, g, o, c, h, tanh_c;

  void reset(int new_len, int new_d_in, int new_d_h);
  double* row_x(int t) { return x.data() + static_cast<size_t>(t) * d_in; }
  double* row_h(int t) { return h.data() + static_cast<size_t>(t) * d_h; }
  const double* row_h(int t) const { return h.data() + static_cast<size_t>(t) * d_h; }
  const double* row_c(int t) const { return c.data() + static_cast<size_t>(t) * d_h; }
};

// One recurrence step; writes gates and the new state into cache row t.
// h_prev/c_prev may be null for the zero initial state.
void lstm_forward_step(const LstmParams& p, LstmSequenceCache& cache, int t,
                       const double* h_prev, const double* c_prev);

// Backward through cache row t. dh/dc carry the incoming gradient; on
// return dh_prev/dc_prev hold the gradient for step t-1 and dx the gradient
// of the input row. Parameter gradients accumulate into `grads`.
void lstm_backward_step(const LstmParams& p, const LstmSequenceCache& cache, int t,
                        const double* h_prev, const double* c_prev, const double* dh,
                        const double* dc, LstmParams& grads, double* dx, double* dh_prev,
                        double* dc_prev);

// Friendly single-step form: (x, h, c) -> (h', c'). Throws on shape
// mismatch or non-finite input.
void lstm_step(const LstmParams& p, std::span<const double> x, std::span<const double> h,
               std::span<const double> c, std::vector<double>& h_out, std::vector<double>& c_out);

template <typename F>
void for_each_tensor(LstmParams& p, const std::string& prefix, F&& f) {
  f(prefix + ".w_xi", p.w_xi);
  f(prefix + ".w_hi", p.w_hi);
  f(prefix + ".b_i", p.b_i);
  f(prefix + ".w_xf", p.w_xf);
  f(prefix + ".w_hf", p.w_hf);
  f(prefix + ".b_f", p.b_f);
  f(prefix + ".w_xg", p.w_xg);
  f(prefix + ".w_hg", p.w_hg);
  f(prefix + ".b_g", p.b_g);
  f(prefix + ".w_xo", p.w_xo);
  f(prefix + ".w_ho", p.w_ho);
  f(prefix + ".b_o", p.b_o);
}

}  // namespace gridlang
