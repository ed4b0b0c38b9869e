#pragma once

#include "svtail/rng.hpp"
#include "svtail/types.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace svtail {

/// Sum of |x_i|^2 over the half-open band lo < |x_i|^2 <= hi. The boundary
/// convention is fixed project-wide: exclusive below, inclusive above.
template <typename Derived>
double mass_in_band(const Eigen::MatrixBase<Derived>& x, double lo, double hi) {
  if (!(lo >= 0.0)) throw std::invalid_argument("mass_in_band: lo must be >= 0");
  if (!(lo < hi)) throw std::invalid_argument("mass_in_band: requires lo < hi");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::norm(x.derived()(i));
    if (m > lo && m <= hi) s += m;
  }
  return s;
}

/// Sum of |x_i|^2 over |x_i|^2 <= hi.
template <typename Derived>
double mass_at_or_below(const Eigen::MatrixBase<Derived>& x, double hi) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::norm(x.derived()(i));
    if (m <= hi) s += m;
  }
  return s;
}

/// y_i = x_i when |x_i|^2 <= thresh, else 0. Coordinatewise |y_i| <= |x_i|.
template <typename Derived>
Vector zero_out_above(const Eigen::MatrixBase<Derived>& x, double thresh) {
  if (!(thresh > 0.0)) throw std::invalid_argument("zero_out_above: thresh must be > 0");
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Complex v = x.derived()(i);
    y(i) = std::norm(v) <= thresh ? v : Complex(0.0, 0.0);
  }
  return y;
}

/// Constants of the sphere partition. Coordinates at or below 1/(c1*n) are
/// "small", those in (1/(c1*n), 1/(c2*n^(1-delta))] sit in the middle band.
struct ClassificationParams {
  double c1 = 0.5;
  double c2 = 1.0;
  double eps1 = 0.1;
  double eps2 = 0.1;
  double delta = 0.5;

  double small_threshold(int n) const { return 1.0 / (c1 * n); }
  double band_threshold(int n) const {
    return 1.0 / (c2 * std::pow(static_cast<double>(n), 1.0 - delta));
  }

  void validate(int n) const {
    if (!(c1 > 0.0 && c2 > 0.0 && eps1 > 0.0 && eps2 > 0.0))
      throw std::invalid_argument("ClassificationParams: constants must be > 0");
    if (!(eps1 + eps2 < 1.0))
      throw std::invalid_argument("ClassificationParams: requires eps1 + eps2 < 1");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("ClassificationParams: delta must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("ClassificationParams: n must be >= 1");
    if (!(small_threshold(n) < band_threshold(n)))
      throw std::invalid_argument(
          "ClassificationParams: small threshold must lie below band threshold "
          "(c2/c1 < n^delta); the bands do not nest at this dimension");
  }
};

struct SphereClass {
  enum class Verdict { HC, MC, IC };
  Verdict verdict = Verdict::HC;
  double small_mass = 0.0;  // mass at or below 1/(c1 n)
  double band_mass = 0.0;   // mass in (1/(c1 n), 1/(c2 n^(1-delta))]
  double low_mass = 0.0;    // mass at or below 1/(c2 n^(1-delta))
};

inline const char* to_string(SphereClass::Verdict v) {
  switch (v) {
    case SphereClass::Verdict::HC: return "HC";
    case SphereClass::Verdict::MC: return "MC";
    default: return "IC";
  }
}

/// Membership tests of the partition, applied in order: IC when
/// small_mass >= eps1, else MC when band_mass >= eps2, else HC, which must
/// satisfy low_mass < eps1 + eps2 (anything else indicates an inconsistent
/// parameter set or a broken invariant and raises).
SphereClass classify_vector(const Vector& x, const ClassificationParams& params);

/// Checkable conclusion of the sparse-net approximation: x3 is a-sparse,
/// 3*sqrt(d1)-close to x, and keeps band mass d2 - 57*sqrt(d1) in
/// (1/(2a), 4/b].
struct NetCertificate {
  int a = 0;
  double b = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double dist = 0.0;          // |x - x3|_2
  double band_mass_x3 = 0.0;  // mass of x3 in (1/(2a), 4/b]
  int support_size = 0;
};

/// The four-step approximation pipeline for x in
///   V = { |x|=1 : mass(<=1/a) < d1, mass((1/a,1/b]) >= d2 }:
/// drop small entries, renormalize, then round the surviving a-sparse
/// vector to a lattice of pitch sqrt(d1)/(2*sqrt(a)) on real and imaginary
/// parts and renormalize again. The pitch makes the rounding step a
/// sqrt(d1)-approximation, which is the only property used downstream.
/// Rejects x outside V and parameter sets violating 57*sqrt(d1) < d2 < 1
/// or d1 > 0.1.
std::pair<Vector, NetCertificate> net_approximate(const Vector& x, int a, double b, double d1,
                                                  double d2);

/// log of the sparse-net cardinality bound (3/sqrt(d1))^(2a) * (n e / a)^a.
double net_cardinality_bound(int n, int a, double d1);

/// Unit vector whose classify_vector verdict equals the request, built by
/// explicit band allocation followed by Gaussian phase randomization and a
/// random support permutation. Throws when the class is infeasible for
/// (params, n).
Vector sample_class_member(SphereClass::Verdict verdict, const ClassificationParams& params,
                           int n, const SeedPath& seed);

/// Fuzz-corpus generator for V-members: the mass profile is drawn from the
/// feasible region (band mass >= d2, small mass < d1, remainder on heavy
/// coordinates), then phases are randomized.
Vector sample_v_member(int n, int a, double b, double d1, double d2, const SeedPath& seed);

}  // namespace svtail
