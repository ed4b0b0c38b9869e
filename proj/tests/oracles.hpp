// Test-only oracles, kept independent of the library's solver paths: they
// compute singular values through closed-form eigenvalues of the Gram matrix
// (quadratic/cubic formulas), not through any iteration or SVD.
#pragma once

#include "svtail/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace svtail::testing {

// Eigenvalues of a Hermitian 2x2 matrix by the quadratic formula.
inline std::array<double, 2> hermitian_eigs_2x2(const Matrix& h) {
  const double tr = std::real(h(0, 0) + h(1, 1));
  const double det = std::real(h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0));
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

// Eigenvalues of a Hermitian 3x3 matrix by the trigonometric cubic formula.
inline std::array<double, 3> hermitian_eigs_3x3(const Matrix& h) {
  const double q = std::real(h(0, 0) + h(1, 1) + h(2, 2)) / 3.0;
  Matrix b = h - q * Matrix::Identity(3, 3);
  double p2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p2 += std::norm(b(i, j));
  const double p = std::sqrt(p2 / 6.0);
  if (p < 1e-300) return {q, q, q};
  b /= p;
  double detb = std::real(b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                          b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                          b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0)));
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> out{e3, e2, e1};
  std::sort(out.begin(), out.end());
  return out;
}

// Singular values (ascending) of a matrix with min(rows, cols) <= 3, via the
// characteristic polynomial of the small-side Gram matrix.
inline std::vector<double> charpoly_singular_values(const Matrix& a) {
  const Matrix g = a.rows() <= a.cols() ? Matrix(a * a.adjoint()) : Matrix(a.adjoint() * a);
  std::vector<double> eig;
  if (g.rows() == 1) {
    eig = {std::real(g(0, 0))};
  } else if (g.rows() == 2) {
    const auto e = hermitian_eigs_2x2(g);
    eig = {e[0], e[1]};
  } else if (g.rows() == 3) {
    const auto e = hermitian_eigs_3x3(g);
    eig = {e[0], e[1], e[2]};
  } else {
    throw std::invalid_argument("charpoly_singular_values: min dimension must be <= 3");
  }
  for (double& v : eig) v = std::sqrt(std::max(0.0, v));
  return eig;
}

inline double binomial_log_pmf(std::uint64_t k, std::uint64_t n, double p) {
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

}  // namespace svtail::testing
