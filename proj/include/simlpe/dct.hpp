#pragma once

// Orthonormal type-II DCT basis over the temporal axis. With the scaling used
// here the basis is orthonormal, so the inverse is exactly the transpose and
// no numerical matrix inversion is involved. The basis is built once per
// sequence length and shared immutably.

#include <cmath>

#include "simlpe/error.hpp"
#include "simlpe/matrix.hpp"

namespace simlpe {

template <typename S>
struct DctBasis {
  int size = 0;
  Matrix<S> forward;   // T x T
  Matrix<S> inverse;   // transpose of forward
};

// D[i][j] = sqrt(2/T) / sqrt(1 + [i == 0]) * cos(pi * (2j + 1) * i / (2T)).
// Entries are evaluated in double and narrowed to S.
template <typename S>
DctBasis<S> build_dct_basis(int size) {
  if (size < 1)
    throw ConfigError("dct: basis size must be at least 1, got " +
                      std::to_string(size));
  DctBasis<S> b;
  b.size = size;
  b.forward = Matrix<S>(size, size);
  const double t = static_cast<double>(size);
  for (int i = 0; i < size; ++i) {
    const double scale = std::sqrt(2.0 / t) / std::sqrt(i == 0 ? 2.0 : 1.0);
    for (int j = 0; j < size; ++j) {
      const double angle = M_PI * (2.0 * j + 1.0) * i / (2.0 * t);
      b.forward(i, j) = static_cast<S>(scale * std::cos(angle));
    }
  }
  b.inverse = transpose(b.forward);
  return b;
}

// Temporal mixing only: columns never interact.
template <typename S>
Matrix<S> apply_dct(const DctBasis<S>& basis, const Matrix<S>& x) {
  if (x.rows() != basis.size)
    throw ShapeError("dct: input is " + x.shape_str() + ", basis size is " +
                     std::to_string(basis.size));
  return matmul(basis.forward, x);
}

template <typename S>
Matrix<S> apply_idct(const DctBasis<S>& basis, const Matrix<S>& y) {
  if (y.rows() != basis.size)
    throw ShapeError("idct: input is " + y.shape_str() + ", basis size is " +
                     std::to_string(basis.size));
  return matmul(basis.inverse, y);
}

}  // namespace simlpe
