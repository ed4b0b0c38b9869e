#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace svtail {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class Field { Real, Complex };

inline const char* to_string(Field f) {
  return f == Field::Real ? "real" : "complex";
}

inline Field field_from_string(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw std::invalid_argument("unknown field '" + s + "' (expected real|complex)");
}

/// Law of the sparse product ensemble: entries xi_ij * delta_ij where the
/// Bernoulli layer keeps an entry with probability p = n^(delta - 1).
struct EnsembleSpec {
  int n = 1;
  double delta = 0.5;
  Field field = Field::Complex;

  /// p = n^(delta - 1), derived so the invariant cannot drift.
  double sparsity() const { return std::pow(static_cast<double>(n), delta - 1.0); }

  void validate() const {
    if (n < 1) throw std::invalid_argument("EnsembleSpec: n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("EnsembleSpec: delta must lie in (0,1)");
  }
};

}  // namespace svtail
