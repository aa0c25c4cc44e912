#include "gridlang/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gridlang {

Tensor Tensor::zeros(std::vector<int> shape) {
  Tensor t;
  int64_t total = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
    total *= d;
  }
  t.shape = std::move(shape);
  t.v.assign(static_cast<size_t>(total), 0.0);
  return t;
}

void fill_uniform(Tensor& t, Rng& rng, double lo, double hi) {
  for (double& x : t.v) x = rng.uniform(lo, hi);
}

bool all_finite(const Tensor& t) {
  for (double x : t.v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

void matvec(const Tensor& w, const double* x, double* y, bool accumulate) {
  const int rows = w.rows();
  const int cols = w.cols();
  for (int r = 0; r < rows; ++r) {
    const double* wr = w.row(r);
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = accumulate ? y[r] + acc : acc;
  }
}

void matvec_transposed(const Tensor& w, const double* dy, double* dx, bool accumulate) {
  const int rows = w.rows();
  const int cols = w.cols();
  if (!accumulate) std::fill(dx, dx + cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* wr = w.row(r);
    const double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < cols; ++c) dx[c] += wr[c] * g;
  }
}

void add_outer(Tensor& dw, const double* dy, const double* x) {
  const int rows = dw.rows();
  const int cols = dw.cols();
  for (int r = 0; r < rows; ++r) {
    double* wr = dw.row(r);
    const double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < cols; ++c) wr[c] += g * x[c];
  }
}

void add_to(std::span<const double> a, double* y) {
  for (size_t i = 0; i < a.size(); ++i) y[i] += a[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace gridlang
