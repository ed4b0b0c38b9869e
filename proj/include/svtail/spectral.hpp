#pragma once

#include "svtail/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace svtail {

/// Extreme singular values with the certificate that produced them.
/// `residual` is the final Gram-eigenpair residual relative to sigma_max^2;
/// `converged` is false only when the iterative path stalled *and* the SVD
/// fallback was unavailable (it never is; kept for the contract).
struct SingularTriple {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
  bool used_fallback = false;
};

/// Hilbert-Schmidt (Frobenius) norm; an upper bound for the operator norm.
template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& A) {
  return A.norm();
}

namespace detail {

template <typename MatrixType>
struct GramKind {
  using Scalar = typename MatrixType::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
};

// Power iteration for the top eigenpair of a Hermitian PSD matrix G.
// Returns the Rayleigh quotient; the residual certificate |G v - l v| <= r
// bounds |l - lambda| <= r for Hermitian G.
template <typename MatG, typename VecG>
int power_iteration(const MatG& G, VecG& v, typename GramKind<MatG>::Real& lambda,
                    typename GramKind<MatG>::Real& resid, double tol, int max_iter) {
  using Real = typename GramKind<MatG>::Real;
  int it = 0;
  lambda = Real(0);
  for (; it < max_iter; ++it) {
    VecG w = G * v;
    const Real nw = w.norm();
    if (!(nw > Real(0)) || !std::isfinite(static_cast<double>(nw))) break;
    v = w / nw;
    w = G * v;
    lambda = std::real(v.dot(w));
    resid = (w - lambda * v).norm();
    if (resid <= tol * std::max(lambda, Real(0))) return it + 1;
  }
  return it;
}

}  // namespace detail

/// Largest and smallest singular values of a square or nearly-square dense
/// matrix (for an (n-1) x n input, sigma_min is the smallest of the n-1
/// singular values). sigma_max comes from power iteration on the small-side
/// Gram operator, sigma_min from inverse iteration through its LDLT
/// factorization; either path falls back to a full Jacobi SVD when the
/// residual certificate cannot be met, which is exactly the near-singular
/// regime the experiments probe.
template <typename Derived>
SingularTriple singular_extremes(const Eigen::MatrixBase<Derived>& A_expr, double tol = 1e-8) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Mat A = A_expr.derived();
  if (A.rows() == 0 || A.cols() == 0)
    throw std::invalid_argument("singular_extremes: empty matrix");
  const auto shape_gap = std::abs(static_cast<long>(A.rows()) - static_cast<long>(A.cols()));
  if (shape_gap > 1)
    throw std::invalid_argument("singular_extremes: expected a square or (n-1) x n matrix");
  if (!(tol > 0.0)) throw std::invalid_argument("singular_extremes: tol must be > 0");

  SingularTriple out;
  const long m = std::min(A.rows(), A.cols());

  // Small-side Gram operator: eigenvalues are exactly the squared singular
  // values, with no padding zeros for the rectangular case.
  Mat G = (A.rows() <= A.cols()) ? Mat(A * A.adjoint()) : Mat(A.adjoint() * A);

  const double gnorm = G.norm();
  if (gnorm == 0.0) return out;  // zero matrix

  // Deterministic start vector, slightly graded to avoid symmetry traps.
  Vec v(m);
  for (long i = 0; i < m; ++i) v(i) = Scalar(1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(m));
  v /= v.norm();

  double lam_max = 0.0, resid_max = 0.0;
  const int it_max = detail::power_iteration(G, v, lam_max, resid_max, 0.5 * tol, 400);
  out.iterations = it_max;

  bool ok_max = lam_max > 0.0 && resid_max <= 0.5 * tol * lam_max;

  // Inverse iteration; the Rayleigh residual must certify sigma_min to
  // relative tol, i.e. r <= tol * lambda_min. Ill-conditioned inputs (the
  // events under study) cannot meet this through a squared spectrum in
  // double precision and take the SVD path instead.
  bool ok_min = false;
  double lam_min = 0.0;
  if (ok_max) {
    Eigen::LDLT<Mat> ldlt(G);
    if (ldlt.info() == Eigen::Success) {
      Vec u(m);
      for (long i = 0; i < m; ++i)
        u(i) = Scalar(1.0 - 0.3 * static_cast<double>(i) / static_cast<double>(m));
      u /= u.norm();
      double resid_min = 0.0;
      for (int it = 0; it < 200; ++it) {
        Vec w = ldlt.solve(u);
        const double nw = w.norm();
        if (!(nw > 0.0) || !std::isfinite(nw)) break;
        u = w / nw;
        Vec gu = G * u;
        lam_min = std::real(u.dot(gu));
        resid_min = (gu - Scalar(lam_min) * u).norm();
        ++out.iterations;
        if (lam_min > 0.0 && resid_min <= tol * lam_min) {
          ok_min = true;
          break;
        }
      }
      out.residual = lam_max > 0.0 ? resid_min / lam_max : resid_min;
    }
  }

  if (ok_max && ok_min) {
    out.sigma_max = std::sqrt(lam_max);
    out.sigma_min = std::sqrt(std::max(lam_min, 0.0));
    out.residual = resid_max / lam_max;
    return out;
  }

  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  out.sigma_max = s(0);
  out.sigma_min = s(s.size() - 1);
  out.residual = 0.0;
  out.used_fallback = true;
  return out;
}

/// Operator norm alone (no sigma_min work): power iteration on the
/// small-side Gram operator with the same residual certificate and SVD
/// fallback as singular_extremes.
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& A_expr, double tol = 1e-8) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Mat A = A_expr.derived();
  if (A.size() == 0) return 0.0;
  Mat G = (A.rows() <= A.cols()) ? Mat(A * A.adjoint()) : Mat(A.adjoint() * A);
  if (G.norm() == 0.0) return 0.0;

  const long m = G.rows();
  Vec v(m);
  for (long i = 0; i < m; ++i) v(i) = Scalar(1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(m));
  v /= v.norm();
  double lam = 0.0, resid = 0.0;
  detail::power_iteration(G, v, lam, resid, tol, 400);
  if (lam > 0.0 && resid <= tol * lam) return std::sqrt(lam);
  return Eigen::JacobiSVD<Mat>(A).singularValues()(0);
}

/// Result of extracting one unit kernel vector of an (n-1) x n matrix.
struct KernelVector {
  Vector eta;
  bool rank_deficient = false;  // numerical kernel dimension > 1
  double residual = 0.0;        // |B eta| / |B|_op
};

/// Unit eta with B eta = 0 (up to tol * |B|_op), from the right singular
/// vector of the trailing singular value. Flags rank deficiency when the
/// smallest of the n-1 singular values drops below tol * sigma_max.
KernelVector kernel_unit_vector(const Matrix& B, double tol = 1e-8);

/// Euclidean distance from y to span(W), by projection against an
/// orthonormalized basis with one re-orthogonalization pass.
/// Empty spans give |y|.
double distance_to_span(const Vector& y, const Matrix& W);
double distance_to_span(const Vector& y, const std::vector<Vector>& W);

}  // namespace svtail
