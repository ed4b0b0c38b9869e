#pragma once

#include "svtail/rng.hpp"
#include "svtail/types.hpp"

namespace svtail {

/// n x n matrix of independent {0,1} entries, each 1 with probability p.
/// Entries are drawn in row-major order from the stream named by `seed`.
Matrix sample_bernoulli_mask(int n, double p, const SeedPath& seed);

/// n x n matrix of i.i.d. N(0,1) entries (real field) or N_C(0,1) entries
/// (complex field, E|xi|^2 = 1). Row-major draw order.
Matrix sample_gaussian_matrix(int n, Field field, const SeedPath& seed);

/// Entrywise product of an independent Gaussian matrix and Bernoulli mask
/// with p = n^(delta-1). The two layers live on disjoint sub-streams
/// ("<label>/mask" and "<label>/gauss") so either can be resampled or held
/// fixed independently of the other.
Matrix assemble_sparse_matrix(const EnsembleSpec& spec, const SeedPath& seed);

/// One column of the sparse ensemble (same entry law as a column of
/// assemble_sparse_matrix, with its own mask/gauss sub-streams).
Vector sample_sparse_column(const EnsembleSpec& spec, const SeedPath& seed);

/// t * Id with the lower-right corner entry zeroed out: M_ii = t for i < n,
/// M_nn = 0. Singular values are {t (multiplicity n-1), 0}.
Matrix build_shift_matrix(int n, double t);

/// The unit-norm-or-larger test vector x with x_i = -(lambda/t) A_in for
/// i < n and x_n = 1 exactly.
Vector build_shift_witness(const Matrix& A, double t, double lambda);

}  // namespace svtail
