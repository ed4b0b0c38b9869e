#include "svtail/ensemble.hpp"

#include <stdexcept>

namespace svtail {

Matrix sample_bernoulli_mask(int n, double p, const SeedPath& seed) {
  if (n < 1) throw std::invalid_argument("sample_bernoulli_mask: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_bernoulli_mask: p must lie in [0,1]");
  CounterRng rng(seed);
  Matrix mask(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mask(i, j) = rng.next_bernoulli(p) ? 1.0 : 0.0;
  return mask;
}

Matrix sample_gaussian_matrix(int n, Field field, const SeedPath& seed) {
  if (n < 1) throw std::invalid_argument("sample_gaussian_matrix: n must be >= 1");
  CounterRng rng(seed);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_scalar(field);
  return g;
}

Matrix assemble_sparse_matrix(const EnsembleSpec& spec, const SeedPath& seed) {
  spec.validate();
  const Matrix mask = sample_bernoulli_mask(spec.n, spec.sparsity(), seed.sub("mask"));
  const Matrix gauss = sample_gaussian_matrix(spec.n, spec.field, seed.sub("gauss"));
  return mask.cwiseProduct(gauss);
}

Vector sample_sparse_column(const EnsembleSpec& spec, const SeedPath& seed) {
  spec.validate();
  const double p = spec.sparsity();
  CounterRng mask_rng(seed.sub("mask"));
  CounterRng gauss_rng(seed.sub("gauss"));
  Vector y(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const bool keep = mask_rng.next_bernoulli(p);
    const Complex xi = gauss_rng.next_scalar(spec.field);
    y(i) = keep ? xi : Complex(0.0, 0.0);
  }
  return y;
}

Matrix build_shift_matrix(int n, double t) {
  if (n < 1) throw std::invalid_argument("build_shift_matrix: n must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("build_shift_matrix: t must be > 0");
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) m(i, i) = t;
  return m;
}

Vector build_shift_witness(const Matrix& A, double t, double lambda) {
  if (A.rows() != A.cols()) throw std::invalid_argument("build_shift_witness: A must be square");
  if (!(t > 0.0)) throw std::invalid_argument("build_shift_witness: t must be > 0");
  const int n = static_cast<int>(A.rows());
  Vector x(n);
  for (int i = 0; i + 1 < n; ++i) x(i) = -(lambda / t) * A(i, n - 1);
  x(n - 1) = 1.0;
  return x;
}

}  // namespace svtail
