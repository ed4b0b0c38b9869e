#include "svtail/sphere.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace svtail {

namespace {

Complex random_phase(CounterRng& rng) {
  for (;;) {
    const Complex g = rng.next_complex_gaussian();
    const double m = std::abs(g);
    if (m > 1e-12) return g / m;
  }
}

// Spread `total` over `count` coordinates, all values kept inside
// (lo, hi]; starts from the equal split and applies bounded random
// transfers so the fuzz corpus hits band edges.
std::vector<double> jittered_group(double total, long count, double lo, double hi,
                                   CounterRng& rng) {
  std::vector<double> m(static_cast<std::size_t>(count), total / static_cast<double>(count));
  if (count < 2) return m;
  const double lo_strict = lo <= 0.0 ? 0.0 : lo * (1.0 + 1e-12);
  for (long r = 0; r < 3 * count; ++r) {
    const auto i = static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(count));
    const auto j = static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(count));
    if (i == j) continue;
    const double room_up = hi - m[i];
    const double room_down = m[j] - lo_strict;
    const double cap = std::min(room_up, room_down);
    if (cap <= 0.0) continue;
    const double tau = rng.next_unit() * cap;
    m[i] += tau;
    m[j] -= tau;
    if (m[i] > hi || m[j] <= lo) {  // roll back a rounding overshoot
      m[i] -= tau;
      m[j] += tau;
    }
  }
  return m;
}

// Place the squared-magnitude profile on random coordinates with random
// phases and return the renormalized unit vector.
Vector realize_profile(const std::vector<double>& masses, int n, CounterRng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const auto k = masses.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.next_u64() %
                                                static_cast<std::uint64_t>(n - static_cast<int>(i)));
    std::swap(idx[i], idx[j]);
  }
  Vector x = Vector::Zero(n);
  for (std::size_t i = 0; i < k; ++i)
    x(idx[i]) = std::sqrt(masses[i]) * random_phase(rng);
  const double nx = x.norm();
  if (!(nx > 0.0)) throw std::logic_error("realize_profile: empty mass profile");
  return x / nx;
}

long pick_in_range(long lo, long hi, CounterRng& rng) {
  return lo + static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

SphereClass classify_vector(const Vector& x, const ClassificationParams& params) {
  const int n = static_cast<int>(x.size());
  params.validate(n);
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("classify_vector: x must be a unit vector");

  const double ts = params.small_threshold(n);
  const double tb = params.band_threshold(n);

  SphereClass out;
  out.small_mass = mass_at_or_below(x, ts);
  out.band_mass = mass_in_band(x, ts, tb);
  out.low_mass = mass_at_or_below(x, tb);

  if (out.small_mass >= params.eps1) {
    out.verdict = SphereClass::Verdict::IC;
  } else if (out.band_mass >= params.eps2) {
    out.verdict = SphereClass::Verdict::MC;
  } else {
    // Falling through both tests forces low_mass < eps1 + eps2 when the
    // bands nest; anything else is an inconsistency worth surfacing.
    if (!(out.low_mass < params.eps1 + params.eps2 + 1e-12))
      throw std::logic_error("classify_vector: no membership test holds; partition broken");
    out.verdict = SphereClass::Verdict::HC;
  }
  return out;
}

std::pair<Vector, NetCertificate> net_approximate(const Vector& x, int a, double b, double d1,
                                                  double d2) {
  if (a < 1) throw std::invalid_argument("net_approximate: a must be >= 1");
  if (!(b > 0.0)) throw std::invalid_argument("net_approximate: b must be > 0");
  if (!(d1 > 0.0 && d1 <= 0.1))
    throw std::invalid_argument("net_approximate: requires 0 < d1 <= 0.1");
  const double sqrt_d1 = std::sqrt(d1);
  if (!(57.0 * sqrt_d1 < d2 && d2 < 1.0))
    throw std::invalid_argument("net_approximate: requires 57*sqrt(d1) < d2 < 1");
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("net_approximate: x must be a unit vector");

  const double inv_a = 1.0 / static_cast<double>(a);
  const double small = mass_at_or_below(x, inv_a);
  const double band = mass_in_band(x, inv_a, 1.0 / b);
  if (!(small < d1) || !(band >= d2))
    throw std::invalid_argument("net_approximate: x is not a member of V for these parameters");

  // Step 2: keep entries with |x_i|^2 > 1/a.
  Vector x1 = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::norm(x(i)) > inv_a) x1(i) = x(i);
  const double n1 = x1.norm();
  // x in V forces band mass >= d2 > 0, so x1 = 0 cannot occur.
  if (!(n1 > 0.0)) throw std::logic_error("net_approximate: empty truncation for x in V");

  // Step 3: renormalize.
  const Vector x2 = x1 / n1;

  // Step 4: deterministic net point; rounding the a-sparse support to a
  // lattice of pitch sqrt(d1)/(2 sqrt(a)) perturbs x2 by at most sqrt(d1)
  // including the final renormalization.
  const double pitch = sqrt_d1 / (2.0 * std::sqrt(static_cast<double>(a)));
  Vector q = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x2(i) == Complex(0.0, 0.0)) continue;
    q(i) = Complex(std::round(x2(i).real() / pitch) * pitch,
                   std::round(x2(i).imag() / pitch) * pitch);
  }
  const double nq = q.norm();
  if (!(nq > 0.0)) throw std::logic_error("net_approximate: lattice rounding annihilated x2");
  const Vector x3 = q / nq;

  NetCertificate cert;
  cert.a = a;
  cert.b = b;
  cert.d1 = d1;
  cert.d2 = d2;
  cert.dist = (x - x3).norm();
  cert.band_mass_x3 = mass_in_band(x3, 1.0 / (2.0 * a), 4.0 / b);
  cert.support_size = static_cast<int>((x3.array() != Complex(0.0, 0.0)).count());

  if (cert.dist > 3.0 * sqrt_d1 + 1e-9)
    throw std::logic_error("net_approximate: certificate violates dist <= 3 sqrt(d1)");
  if (cert.support_size > a)
    throw std::logic_error("net_approximate: certificate violates support <= a");
  if (cert.band_mass_x3 < d2 - 57.0 * sqrt_d1 - 1e-9)
    throw std::logic_error("net_approximate: certificate violates the band-mass inequality");
  return {x3, cert};
}

double net_cardinality_bound(int n, int a, double d1) {
  if (a < 1 || a > n) throw std::invalid_argument("net_cardinality_bound: requires 1 <= a <= n");
  if (!(d1 > 0.0 && d1 <= 1.0))
    throw std::invalid_argument("net_cardinality_bound: requires d1 in (0,1]");
  const double da = static_cast<double>(a);
  return 2.0 * da * std::log(3.0 / std::sqrt(d1)) +
         da * (1.0 + std::log(static_cast<double>(n) / da));
}

namespace {

struct Profile {
  std::vector<double> masses;
};

// Append `count` coordinates holding `total` mass inside (lo, hi].
void append_group(Profile& p, double total, long count, double lo, double hi, CounterRng& rng) {
  if (count <= 0 || total <= 0.0) return;
  auto g = jittered_group(total, count, lo, hi, rng);
  p.masses.insert(p.masses.end(), g.begin(), g.end());
}

}  // namespace

Vector sample_v_member(int n, int a, double b, double d1, double d2, const SeedPath& seed) {
  if (n < 2) throw std::invalid_argument("sample_v_member: n must be >= 2");
  if (a < 2 || !(b > 0.0) || !(static_cast<double>(a) > b))
    throw std::invalid_argument("sample_v_member: requires a >= 2 and b < a");
  if (!(d1 > 0.0 && d1 < 1.0 && d2 > 0.0 && d2 < 1.0))
    throw std::invalid_argument("sample_v_member: d1, d2 must lie in (0,1)");

  const double inv_a = 1.0 / static_cast<double>(a);
  const double inv_b = 1.0 / b;

  for (int attempt = 0; attempt < 64; ++attempt) {
    CounterRng rng(seed.sub("v" + std::to_string(attempt)));

    double m_small = (rng.next_unit() < 0.25) ? 0.0 : rng.next_unit() * 0.8 * d1;
    double m_heavy = 0.0;
    if (b > 1.0 && rng.next_unit() < 0.5) {
      const double lo = 2.0 * inv_b;
      const double hi = 1.0 - m_small - d2;
      if (hi > lo) m_heavy = lo + rng.next_unit() * (hi - lo);
    }
    const double m_band = 1.0 - m_small - m_heavy;
    if (m_band < d2) continue;

    const long kb_lo = std::max<long>(1, static_cast<long>(std::ceil(b * m_band)));
    const long kb_hi = static_cast<long>(std::ceil(static_cast<double>(a) * m_band)) - 1;
    if (kb_hi < kb_lo) continue;
    const long kb = pick_in_range(kb_lo, kb_hi, rng);

    long kl = 0;
    if (m_heavy > 0.0) {
      const long kl_hi = static_cast<long>(std::ceil(b * m_heavy)) - 1;
      if (kl_hi < 1) continue;
      kl = pick_in_range(1, kl_hi, rng);
    }

    long ks = 0;
    if (m_small > 0.0)
      ks = static_cast<long>(std::ceil(m_small * static_cast<double>(a))) + 1;

    if (ks + kb + kl > n) continue;

    Profile p;
    append_group(p, m_band, kb, inv_a, inv_b, rng);
    append_group(p, m_heavy, kl, inv_b, 1.0, rng);
    append_group(p, m_small, ks, 0.0, inv_a, rng);

    Vector x = realize_profile(p.masses, n, rng);
    if (mass_at_or_below(x, inv_a) < d1 && mass_in_band(x, inv_a, inv_b) >= d2) return x;
  }
  throw std::runtime_error("sample_v_member: no feasible mass profile for these parameters");
}

Vector sample_class_member(SphereClass::Verdict verdict, const ClassificationParams& params,
                           int n, const SeedPath& seed) {
  params.validate(n);
  const double ts = params.small_threshold(n);
  const double tb = params.band_threshold(n);

  // Static feasibility, reported with the reason.
  if (verdict == SphereClass::Verdict::IC && std::min(1.0, n * ts) < params.eps1)
    throw std::runtime_error(
        "sample_class_member: IC infeasible; at most min(1, n/(c1*n)) = " +
        std::to_string(std::min(1.0, n * ts)) + " mass fits at or below the small threshold");
  if (verdict == SphereClass::Verdict::MC && std::min(1.0, n * tb) < params.eps2)
    throw std::runtime_error("sample_class_member: MC infeasible; band capacity below eps2");
  if (verdict == SphereClass::Verdict::HC && tb >= 1.0)
    throw std::runtime_error(
        "sample_class_member: HC infeasible; no coordinate can exceed the band threshold "
        "(c2*n^(1-delta) <= 1)");

  for (int attempt = 0; attempt < 64; ++attempt) {
    CounterRng rng(seed.sub("class" + std::to_string(attempt)));
    Profile p;

    if (verdict == SphereClass::Verdict::IC) {
      const double cap = std::min(1.0, n * ts);
      double m_small = params.eps1 + rng.next_unit() * (cap - params.eps1);
      double rest = 1.0 - m_small;
      long k_rest = 0;
      if (rest > 0.0) {
        k_rest = static_cast<long>(std::ceil(rest / tb));
        if (rest / static_cast<double>(k_rest) <= ts) {
          m_small += rest;  // remainder too light for the band; keep it small
          rest = 0.0;
          k_rest = 0;
        }
      }
      const long ks = static_cast<long>(std::ceil(m_small / ts));
      if (ks + k_rest > n) continue;
      append_group(p, m_small, ks, 0.0, ts, rng);
      append_group(p, rest, k_rest, ts, tb, rng);
    } else if (verdict == SphereClass::Verdict::MC) {
      const double m_small = rng.next_unit() * 0.5 * params.eps1;
      double m_heavy = 0.0;
      if (tb < 1.0 && rng.next_unit() < 0.5) {
        const double lo = 2.0 * tb;
        const double hi = 1.0 - m_small - params.eps2;
        if (hi > lo) m_heavy = lo + rng.next_unit() * (hi - lo);
      }
      const double m_band = 1.0 - m_small - m_heavy;
      if (m_band < params.eps2) continue;

      const long kb_lo = std::max<long>(1, static_cast<long>(std::ceil(m_band / tb)));
      const long kb_hi = static_cast<long>(std::ceil(m_band / ts)) - 1;
      if (kb_hi < kb_lo) continue;
      const long kb = pick_in_range(kb_lo, kb_hi, rng);
      long kl = 0;
      if (m_heavy > 0.0) {
        const long kl_hi = static_cast<long>(std::ceil(m_heavy / tb)) - 1;
        if (kl_hi < 1) continue;
        kl = pick_in_range(1, kl_hi, rng);
      }
      long ks = 0;
      if (m_small > 0.0) ks = static_cast<long>(std::ceil(m_small / ts)) + 1;
      if (ks + kb + kl > n) continue;
      append_group(p, m_band, kb, ts, tb, rng);
      append_group(p, m_heavy, kl, tb, 1.0, rng);
      append_group(p, m_small, ks, 0.0, ts, rng);
    } else {  // HC
      const double m_small = rng.next_unit() * 0.4 * params.eps1;
      const double m_band = rng.next_unit() * 0.4 * params.eps2;
      const double m_heavy = 1.0 - m_small - m_band;
      const long kl_hi = static_cast<long>(std::ceil(m_heavy / tb)) - 1;
      if (kl_hi < 1) continue;
      const long kl = pick_in_range(1, kl_hi, rng);
      long ks = 0, kb = 0;
      if (m_small > 0.0) ks = static_cast<long>(std::ceil(m_small / ts)) + 1;
      if (m_band > 0.0) {
        const long kb_lo = std::max<long>(1, static_cast<long>(std::ceil(m_band / tb)));
        const long kb_hi2 = static_cast<long>(std::ceil(m_band / ts)) - 1;
        if (kb_hi2 < kb_lo) continue;
        kb = pick_in_range(kb_lo, kb_hi2, rng);
      }
      if (ks + kb + kl > n) continue;
      append_group(p, m_heavy, kl, tb, 1.0, rng);
      append_group(p, m_band, kb, ts, tb, rng);
      append_group(p, m_small, ks, 0.0, ts, rng);
    }

    Vector x = realize_profile(p.masses, n, rng);
    if (classify_vector(x, params).verdict == verdict) return x;
  }
  throw std::runtime_error("sample_class_member: could not realize the requested class");
}

}  // namespace svtail
