#pragma once

// Classical polynomial lattice point sets and the digit interlacing map that
// turns them into interlaced (higher order) polynomial lattice rules.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hoqmc/gf_poly.hpp"

namespace hoqmc {

/// (b, m, P, alpha, q_1..q_d) with d = alpha * s and every q_j in G_{b,m}.
struct GeneratingVector {
  Modulus modulus;
  int alpha = 1;
  std::vector<GfPoly> q;

  PrimeBase base() const noexcept { return modulus.base(); }
  int m() const noexcept { return modulus.degree(); }
  std::size_t d() const noexcept { return q.size(); }
  /// Dimension of the interlaced rule.
  std::size_t s() const noexcept { return alpha > 0 ? q.size() / static_cast<std::size_t>(alpha) : 0; }
  std::uint64_t num_points() const { return modulus.size(); }

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

/// True iff q is nonzero with deg(q) < m (membership in G_{b,m}).
bool in_candidate_set(const GfPoly& q, int m);

struct DigitPoint {
  std::vector<DigitVector> coords;
};

struct PointSet {
  std::size_t dimension = 0;
  std::vector<DigitPoint> points;
};

/// n(x) from the base-b expansion of n; throws std::invalid_argument if n < 0.
GfPoly index_to_poly(std::int64_t n, PrimeBase b);

/// Point n of the classical rule: coordinate j is v_m(n(x) q_j(x) / P(x)).
DigitPoint classical_point(const GeneratingVector& gv, std::uint64_t n);

/// All b^m points of the classical rule in dimension d.
PointSet classical_points(const GeneratingVector& gv);

/// Digit interlacing: digit j + (a-1) alpha of the output is digit a of input j.
DigitVector interlace_scalar(std::span<const DigitVector> x, int alpha);

DigitPoint interlace_point(const DigitPoint& p, int alpha);
PointSet interlace_points(const PointSet& ps, int alpha);

/// Point n of the interlaced rule (alpha * m digits per coordinate).
DigitPoint interlaced_point(const GeneratingVector& gv, std::uint64_t n);

/// Streams the interlaced points in index order without materializing them.
void for_each_interlaced_point(const GeneratingVector& gv,
                               const std::function<void(std::uint64_t, const DigitPoint&)>& fn);

std::vector<double> to_unit_float(const DigitPoint& p);

}  // namespace hoqmc
