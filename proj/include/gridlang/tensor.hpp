#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridlang/rng.hpp"

namespace gridlang {

// Row-major 64-bit float tensor. Models here are tiny; everything runs on
// plain loops and reproducibility beats speed.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;

  static Tensor zeros(std::vector<int> shape);

  int64_t size() const { return static_cast<int64_t>(v.size()); }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols() + c]; }
  double* row(int r) { return v.data() + static_cast<size_t>(r) * cols(); }
  const double* row(int r) const { return v.data() + static_cast<size_t>(r) * cols(); }

  void set_zero() { std::fill(v.begin(), v.end(), 0.0); }
};

void fill_uniform(Tensor& t, Rng& rng, double lo, double hi);
bool all_finite(const Tensor& t);
bool same_shape(const Tensor& a, const Tensor& b);

// y (+)= W x, with W of shape (rows, cols) and |x| = cols.
void matvec(const Tensor& w, const double* x, double* y, bool accumulate);
// dx (+)= W^T dy.
void matvec_transposed(const Tensor& w, const double* dy, double* dx, bool accumulate);
// dW += dy x^T.
void add_outer(Tensor& dw, const double* dy, const double* x);
// y += a
void add_to(std::span<const double> a, double* y);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace gridlang
