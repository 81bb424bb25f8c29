#pragma once

// Dense row-major 2-D matrix plus the differentiable primitives the model is
// built from: matrix product, transpose, square affine layer and layer
// normalization, each with an exact analytic backward. A central-difference
// gradient oracle (fd_check) verifies the backward passes in 64-bit mode.

#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <vector>

#include "simlpe/error.hpp"
#include "simlpe/rng.hpp"

namespace simlpe {

template <typename S>
class Matrix {
  static_assert(std::is_floating_point_v<S>);

 public:
  Matrix() = default;

  Matrix(int rows, int cols, S fill = S(0))
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {}

  Matrix(int rows, int cols, std::initializer_list<S> values)
      : rows_(rows), cols_(cols), data_(values) {
    if (data_.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
      throw ShapeError("matrix literal: " + std::to_string(values.size()) +
                       " values for a " + std::to_string(rows) + "x" +
                       std::to_string(cols) + " matrix");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  S& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  S operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  S* row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const S* row(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }

  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  bool all_finite() const {
    for (S v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static Matrix random_uniform(int rows, int cols, S lo, S hi, Rng& rng) {
    Matrix m(rows, cols);
    for (auto& v : m.data_) v = static_cast<S>(rng.uniform(lo, hi));
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

template <typename S>
bool operator==(const Matrix<S>& a, const Matrix<S>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.data() == b.data();
}

// c = a * b
template <typename S>
Matrix<S> matmul(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions differ, a is " + a.shape_str() +
                     ", b is " + b.shape_str());
  Matrix<S> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    S* crow = c.row(i);
    const S* arow = a.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const S aik = arow[k];
      const S* brow = b.row(k);
      for (int j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// c = a^T * b, accumulated without materializing a^T
template <typename S>
Matrix<S> matmul_tn(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows())
    throw ShapeError("matmul_tn: row counts differ, a is " + a.shape_str() +
                     ", b is " + b.shape_str());
  Matrix<S> c(a.cols(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const S* arow = a.row(i);
    const S* brow = b.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const S aik = arow[k];
      S* crow = c.row(k);
      for (int j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

template <typename S>
Matrix<S> transpose(const Matrix<S>& a) {
  Matrix<S> t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const S* arow = a.row(i);
    for (int j = 0; j < a.cols(); ++j) t(j, i) = arow[j];
  }
  return t;
}

// c = a * b^T
template <typename S>
Matrix<S> matmul_nt(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.cols() != b.cols())
    throw ShapeError("matmul_nt: column counts differ, a is " + a.shape_str() +
                     ", b is " + b.shape_str());
  return matmul(a, transpose(b));
}

template <typename S>
Matrix<S> add(const Matrix<S>& a, const Matrix<S>& b) {
  if (!a.same_shape(b))
    throw ShapeError("add: shapes differ, a is " + a.shape_str() + ", b is " +
                     b.shape_str());
  Matrix<S> c = a;
  for (size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

template <typename S>
S max_abs_diff(const Matrix<S>& a, const Matrix<S>& b) {
  if (!a.same_shape(b))
    throw ShapeError("max_abs_diff: shapes differ, a is " + a.shape_str() +
                     ", b is " + b.shape_str());
  S m = S(0);
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

template <typename S>
double frobenius_norm(const Matrix<S>& a) {
  double s = 0;
  for (S v : a.data()) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Affine layer: square map applied row-wise along the last axis,
// out[r] = x[r] * weight^T + bias.
// ---------------------------------------------------------------------------

template <typename S>
struct AffineLayer {
  Matrix<S> weight;      // d x d
  std::vector<S> bias;   // d

  int dim() const { return weight.rows(); }
};

template <typename S>
struct AffineGrads {
  Matrix<S> x;
  Matrix<S> weight;
  std::vector<S> bias;
};

template <typename S>
void check_affine(const AffineLayer<S>& layer, const Matrix<S>& x) {
  if (layer.weight.rows() != layer.weight.cols())
    throw ShapeError("affine: weight is not square, " + layer.weight.shape_str());
  if (layer.bias.size() != static_cast<size_t>(layer.weight.rows()))
    throw ShapeError("affine: bias length " + std::to_string(layer.bias.size()) +
                     " does not match weight " + layer.weight.shape_str());
  if (x.cols() != layer.dim())
    throw ShapeError("affine: input is " + x.shape_str() + ", layer dimension is " +
                     std::to_string(layer.dim()));
}

template <typename S>
Matrix<S> affine_forward(const AffineLayer<S>& layer, const Matrix<S>& x) {
  check_affine(layer, x);
  Matrix<S> out = matmul_nt(x, layer.weight);
  for (int r = 0; r < out.rows(); ++r) {
    S* orow = out.row(r);
    for (int c = 0; c < out.cols(); ++c) orow[c] += layer.bias[c];
  }
  return out;
}

template <typename S>
AffineGrads<S> affine_backward(const AffineLayer<S>& layer, const Matrix<S>& x,
                               const Matrix<S>& grad_out) {
  check_affine(layer, x);
  if (grad_out.rows() != x.rows() || grad_out.cols() != layer.dim())
    throw ShapeError("affine_backward: grad is " + grad_out.shape_str() +
                     ", expected " + x.shape_str());
  AffineGrads<S> g;
  g.x = matmul(grad_out, layer.weight);
  g.weight = matmul_tn(grad_out, x);
  g.bias.assign(layer.bias.size(), S(0));
  for (int r = 0; r < grad_out.rows(); ++r) {
    const S* grow = grad_out.row(r);
    for (int c = 0; c < grad_out.cols(); ++c) g.bias[c] += grow[c];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Layer normalization over the last axis, population variance.
// ---------------------------------------------------------------------------

template <typename S>
struct LayerNormParams {
  std::vector<S> gamma;
  std::vector<S> beta;
  S epsilon = S(1e-6);

  int dim() const { return static_cast<int>(gamma.size()); }

  static LayerNormParams identity(int d) {
    LayerNormParams p;
    p.gamma.assign(d, S(1));
    p.beta.assign(d, S(0));
    return p;
  }
};

template <typename S>
struct LayerNormCache {
  Matrix<S> normalized;     // (x - mean) * inv_std, before the affine
  std::vector<S> mean;      // per row
  std::vector<S> inv_std;   // per row
};

template <typename S>
struct LayerNormGrads {
  Matrix<S> x;
  std::vector<S> gamma;
  std::vector<S> beta;
};

template <typename S>
Matrix<S> layernorm_forward(const LayerNormParams<S>& p, const Matrix<S>& x,
                            LayerNormCache<S>* cache = nullptr) {
  const int d = p.dim();
  if (d == 0) throw ShapeError("layernorm: normalized dimension is 0");
  if (p.beta.size() != static_cast<size_t>(d))
    throw ShapeError("layernorm: gamma length " + std::to_string(d) +
                     " != beta length " + std::to_string(p.beta.size()));
  if (x.cols() != d)
    throw ShapeError("layernorm: input is " + x.shape_str() +
                     ", normalized dimension is " + std::to_string(d));

  Matrix<S> out(x.rows(), d);
  if (cache) {
    cache->normalized = Matrix<S>(x.rows(), d);
    cache->mean.assign(x.rows(), S(0));
    cache->inv_std.assign(x.rows(), S(0));
  }
  for (int r = 0; r < x.rows(); ++r) {
    const S* xrow = x.row(r);
    S mean = S(0);
    for (int c = 0; c < d; ++c) mean += xrow[c];
    mean /= static_cast<S>(d);
    S var = S(0);
    for (int c = 0; c < d; ++c) {
      const S dv = xrow[c] - mean;
      var += dv * dv;
    }
    var /= static_cast<S>(d);
    const S inv_std = S(1) / std::sqrt(var + p.epsilon);
    S* orow = out.row(r);
    for (int c = 0; c < d; ++c) {
      const S n = (xrow[c] - mean) * inv_std;
      orow[c] = p.gamma[c] * n + p.beta[c];
      if (cache) cache->normalized(r, c) = n;
    }
    if (cache) {
      cache->mean[r] = mean;
      cache->inv_std[r] = inv_std;
    }
  }
  return out;
}

template <typename S>
LayerNormGrads<S> layernorm_backward(const LayerNormParams<S>& p,
                                     const LayerNormCache<S>& cache,
                                     const Matrix<S>& grad_out) {
  const int d = p.dim();
  if (!cache.normalized.same_shape(grad_out) ||
      cache.mean.size() != static_cast<size_t>(grad_out.rows()))
    throw ShapeError("layernorm_backward: cache holds " +
                     cache.normalized.shape_str() + ", grad is " +
                     grad_out.shape_str());
  LayerNormGrads<S> g;
  g.x = Matrix<S>(grad_out.rows(), d);
  g.gamma.assign(d, S(0));
  g.beta.assign(d, S(0));
  for (int r = 0; r < grad_out.rows(); ++r) {
    const S* grow = grad_out.row(r);
    const S* nrow = cache.normalized.row(r);
    const S inv_std = cache.inv_std[r];
    // h = gamma (.) grad; dx = inv_std * (h - mean(h) - n * mean(h (.) n))
    S mean_h = S(0), mean_hn = S(0);
    for (int c = 0; c < d; ++c) {
      const S h = grow[c] * p.gamma[c];
      mean_h += h;
      mean_hn += h * nrow[c];
      g.gamma[c] += grow[c] * nrow[c];
      g.beta[c] += grow[c];
    }
    mean_h /= static_cast<S>(d);
    mean_hn /= static_cast<S>(d);
    S* xrow = g.x.row(r);
    for (int c = 0; c < d; ++c) {
      const S h = grow[c] * p.gamma[c];
      xrow[c] = inv_std * (h - mean_h - nrow[c] * mean_hn);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient oracle (64-bit only; 32-bit arithmetic does not
// leave enough headroom between truncation and cancellation error).
// ---------------------------------------------------------------------------

// Compares an analytic gradient against the central difference of f at theta,
// coordinate by coordinate. Returns the worst relative error
// |g_fd - g_an| / max(1e-12, |g_fd| + |g_an|).
inline double fd_check(const std::function<double(const std::vector<double>&)>& f,
                       std::vector<double> theta,
                       const std::vector<double>& analytic_grad, double h) {
  if (h <= 0) throw ConfigError("fd_check: step h must be positive");
  if (analytic_grad.size() != theta.size())
    throw ShapeError("fd_check: gradient has " +
                     std::to_string(analytic_grad.size()) + " entries, theta has " +
                     std::to_string(theta.size()));
  double worst = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double f_plus = f(theta);
    theta[i] = saved - h;
    const double f_minus = f(theta);
    theta[i] = saved;
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
      throw NumericError("fd_check: function value is not finite at coordinate " +
                         std::to_string(i));
    const double g_fd = (f_plus - f_minus) / (2.0 * h);
    const double denom = std::max(1e-12, std::abs(g_fd) + std::abs(analytic_grad[i]));
    worst = std::max(worst, std::abs(g_fd - analytic_grad[i]) / denom);
  }
  return worst;
}

}  // namespace simlpe
