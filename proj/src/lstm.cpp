#include "gridlang/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace gridlang {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams LstmParams::create(int input_size, int hidden_size) {
  LstmParams p;
  auto gate = [&](Tensor& wx, Tensor& wh, Tensor& b) {
    wx = Tensor::zeros({hidden_size, input_size});
    wh = Tensor::zeros({hidden_size, hidden_size});
    b = Tensor::zeros({hidden_size});
  };
  gate(p.w_xi, p.w_hi, p.b_i);
  gate(p.w_xf, p.w_hf, p.b_f);
  gate(p.w_xg, p.w_hg, p.b_g);
  gate(p.w_xo, p.w_ho, p.b_o);
  return p;
}

void LstmSequenceCache::reset(int new_len, int new_d_in, int new_d_h) {
  len = new_len;
  d_in = new_d_in;
  d_h = new_d_h;
  const size_t n_in = static_cast<size_t>(len) * d_in;
  const size_t n_h = static_cast<size_t>(len) * d_h;
  x.assign(n_in, 0.0);
  i.assign(n_h, 0.0);
  f.assign(n_h, 0.0);
  g.assign(n_h, 0.0);
  o.assign(n_h, 0.0);
  c.assign(n_h, 0.0);
  h.assign(n_h, 0.0);
  tanh_c.assign(n_h, 0.0);
}

void lstm_forward_step(const LstmParams& p, LstmSequenceCache& cache, int t,
                       const double* h_prev, const double* c_prev) {
  const int d = cache.d_h;
  const size_t off = static_cast<size_t>(t) * d;
  const double* x = cache.x.data() + static_cast<size_t>(t) * cache.d_in;
  double* i = cache.i.data() + off;
  double* f = cache.f.data() + off;
  double* g = cache.g.data() + off;
  double* o = cache.o.data() + off;
  double* c = cache.c.data() + off;
  double* h = cache.h.data() + off;
  double* tc = cache.tanh_c.data() + off;

  auto gate_pre = [&](const Tensor& wx, const Tensor& wh, const Tensor& b, double* out) {
    matvec(wx, x, out, false);
    if (h_prev != nullptr) matvec(wh, h_prev, out, true);
    add_to({b.v.data(), b.v.size()}, out);
  };
  gate_pre(p.w_xi, p.w_hi, p.b_i, i);
  gate_pre(p.w_xf, p.w_hf, p.b_f, f);
  gate_pre(p.w_xg, p.w_hg, p.b_g, g);
  gate_pre(p.w_xo, p.w_ho, p.b_o, o);
  for (int j = 0; j < d; ++j) {
    i[j] = sigmoid(i[j]);
    f[j] = sigmoid(f[j]);
    g[j] = std::tanh(g[j]);
    o[j] = sigmoid(o[j]);
    const double c_in = c_prev != nullptr ? c_prev[j] : 0.0;
    c[j] = f[j] * c_in + i[j] * g[j];
    tc[j] = std::tanh(c[j]);
    h[j] = o[j] * tc[j];
  }
}

void lstm_backward_step(const LstmParams& p, const LstmSequenceCache& cache, int t,
                        const double* h_prev, const double* c_prev, const double* dh,
                        const double* dc, LstmParams& grads, double* dx, double* dh_prev,
                        double* dc_prev) {
  const int d = cache.d_h;
  const int d_in = cache.d_in;
  const size_t off = static_cast<size_t>(t) * d;
  const double* x = cache.x.data() + static_cast<size_t>(t) * d_in;
  const double* i = cache.i.data() + off;
  const double* f = cache.f.data() + off;
  const double* g = cache.g.data() + off;
  const double* o = cache.o.data() + off;
  const double* tc = cache.tanh_c.data() + off;

  // Pre-activation gate gradients (thread-local scratch keeps the training
  // loop allocation-free).
  thread_local std::vector<double> di, df, dg, do_;
  di.assign(d, 0.0);
  df.assign(d, 0.0);
  dg.assign(d, 0.0);
  do_.assign(d, 0.0);
  for (int j = 0; j < d; ++j) {
    const double dct = dc[j] + dh[j] * o[j] * (1.0 - tc[j] * tc[j]);
    const double c_in = c_prev != nullptr ? c_prev[j] : 0.0;
    di[j] = dct * g[j] * i[j] * (1.0 - i[j]);
    df[j] = dct * c_in * f[j] * (1.0 - f[j]);
    dg[j] = dct * i[j] * (1.0 - g[j] * g[j]);
    do_[j] = dh[j] * tc[j] * o[j] * (1.0 - o[j]);
    if (dc_prev != nullptr) dc_prev[j] = dct * f[j];
  }

  std::fill(dx, dx + d_in, 0.0);
  if (dh_prev != nullptr) std::fill(dh_prev, dh_prev + d, 0.0);
  auto gate_back = [&](const Tensor& wx, const Tensor& wh, Tensor& dwx, Tensor& dwh, Tensor& db,
                       const double* dgate) {
    add_outer(dwx, dgate, x);
    if (h_prev != nullptr) add_outer(dwh, dgate, h_prev);
    for (int j = 0; j < d; ++j) db.v[j] += dgate[j];
    matvec_transposed(wx, dgate, dx, true);
    if (dh_prev != nullptr) matvec_transposed(wh, dgate, dh_prev, true);
  };
  gate_back(p.w_xi, p.w_hi, grads.w_xi, grads.w_hi, grads.b_i, di.data());
  gate_back(p.w_xf, p.w_hf, grads.w_xf, grads.w_hf, grads.b_f, df.data());
  gate_back(p.w_xg, p.w_hg, grads.w_xg, grads.w_hg, grads.b_g, dg.data());
  gate_back(p.w_xo, p.w_ho, grads.w_xo, grads.w_ho, grads.b_o, do_.data());
}

void lstm_step(const LstmParams& p, std::span<const double> x, std::span<const double> h,
               std::span<const double> c, std::vector<double>& h_out, std::vector<double>& c_out) {
  const int d = p.hidden_size();
  const int d_in = p.input_size();
  if (static_cast<int>(x.size()) != d_in || static_cast<int>(h.size()) != d ||
      static_cast<int>(c.size()) != d) {
    throw std::invalid_argument("lstm_step: shape mismatch");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("lstm_step: non-finite input");
  }
  LstmSequenceCache cache;
  cache.reset(1, d_in, d);
  std::copy(x.begin(), x.end(), cache.x.begin());
  lstm_forward_step(p, cache, 0, h.data(), c.data());
  h_out.assign(cache.h.begin(), cache.h.begin() + d);
  c_out.assign(cache.c.begin(), cache.c.begin() + d);
}

}  // namespace gridlang
