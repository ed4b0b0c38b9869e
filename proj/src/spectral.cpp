#include "svtail/spectral.hpp"

namespace svtail {

KernelVector kernel_unit_vector(const Matrix& B, double tol) {
  if (B.rows() + 1 != B.cols())
    throw std::invalid_argument("kernel_unit_vector: expected an (n-1) x n matrix");
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_unit_vector: tol must be > 0");

  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  KernelVector out;
  out.eta = svd.matrixV().col(B.cols() - 1);
  out.eta /= out.eta.norm();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  out.rank_deficient = smax > 0.0 && smin < tol * smax;
  out.residual = smax > 0.0 ? (B * out.eta).norm() / smax : 0.0;
  return out;
}

double distance_to_span(const Vector& y, const Matrix& W) {
  if (W.cols() == 0) return y.norm();
  if (W.rows() != y.size())
    throw std::invalid_argument("distance_to_span: ambient dimensions differ");

  // Modified Gram-Schmidt with a second pass; near-dependent columns are
  // dropped rather than normalized into noise.
  Matrix Q(W.rows(), W.cols());
  int r = 0;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    Vector q = W.col(j);
    const double orig = q.norm();
    if (orig == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < r; ++k) q -= Q.col(k).dot(q) * Q.col(k);
    const double nq = q.norm();
    if (nq <= 1e-14 * orig) continue;
    Q.col(r++) = q / nq;
  }

  Vector res = y;
  for (int pass = 0; pass < 2; ++pass)
    for (int k = 0; k < r; ++k) res -= Q.col(k).dot(res) * Q.col(k);
  return res.norm();
}

double distance_to_span(const Vector& y, const std::vector<Vector>& W) {
  Matrix m(y.size(), static_cast<Eigen::Index>(W.size()));
  for (std::size_t j = 0; j < W.size(); ++j) {
    if (W[j].size() != y.size())
      throw std::invalid_argument("distance_to_span: ambient dimensions differ");
    m.col(static_cast<Eigen::Index>(j)) = W[j];
  }
  return distance_to_span(y, m);
}

}  // namespace svtail
