#include "hoqmc/pointgen.hpp"

#include <stdexcept>
#include <string>

namespace hoqmc {

bool in_candidate_set(const GfPoly& q, int m) { return !q.is_zero() && q.degree() < m; }

void GeneratingVector::validate() const {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  if (q.empty()) throw std::invalid_argument("generating vector is empty");
  if (q.size() % static_cast<std::size_t>(alpha) != 0) {
    throw std::invalid_argument("number of polynomials (" + std::to_string(q.size()) +
                                ") is not a multiple of alpha (" + std::to_string(alpha) + ")");
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j].base() != base()) throw std::invalid_argument("q_" + std::to_string(j + 1) + " has the wrong base");
    if (!in_candidate_set(q[j], m())) {
      throw std::invalid_argument("q_" + std::to_string(j + 1) + " is not in G_{b,m}");
    }
  }
}

GfPoly index_to_poly(std::int64_t n, PrimeBase b) {
  if (n < 0) throw std::invalid_argument("point index must be nonnegative");
  return GfPoly::from_index(b, static_cast<std::uint64_t>(n));
}

DigitPoint classical_point(const GeneratingVector& gv, std::uint64_t n) {
  const GfPoly np = GfPoly::from_index(gv.base(), n);
  const auto m = static_cast<std::size_t>(gv.m());
  DigitPoint p;
  p.coords.reserve(gv.d());
  for (const auto& qj : gv.q) p.coords.push_back(v_m(laurent_digits(np, qj, gv.modulus, m), m));
  return p;
}

PointSet classical_points(const GeneratingVector& gv) {
  gv.validate();
  PointSet ps;
  ps.dimension = gv.d();
  const std::uint64_t N = gv.num_points();
  ps.points.reserve(N);
  for (std::uint64_t n = 0; n < N; ++n) ps.points.push_back(classical_point(gv, n));
  return ps;
}

DigitVector interlace_scalar(std::span<const DigitVector> x, int alpha) {
  if (alpha < 1 || x.size() != static_cast<std::size_t>(alpha)) {
    throw std::invalid_argument("interlacing needs exactly alpha inputs");
  }
  const std::size_t m = x.front().precision();
  for (const auto& xi : x) {
    if (xi.precision() != m) throw std::invalid_argument("interlacing inputs differ in precision");
    if (xi.base() != x.front().base()) throw std::invalid_argument("interlacing inputs differ in base");
  }
  std::vector<std::uint8_t> out(m * static_cast<std::size_t>(alpha));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t j = 0; j < x.size(); ++j) out[j + a * x.size()] = x[j].digits()[a];
  }
  return DigitVector(x.front().base(), std::move(out));
}

DigitPoint interlace_point(const DigitPoint& p, int alpha) {
  if (alpha < 1 || p.coords.size() % static_cast<std::size_t>(alpha) != 0) {
    throw std::invalid_argument("point dimension is not divisible by alpha");
  }
  DigitPoint out;
  const std::span<const DigitVector> all(p.coords);
  for (std::size_t j = 0; j < p.coords.size(); j += static_cast<std::size_t>(alpha)) {
    out.coords.push_back(interlace_scalar(all.subspan(j, static_cast<std::size_t>(alpha)), alpha));
  }
  return out;
}

PointSet interlace_points(const PointSet& ps, int alpha) {
  if (alpha < 1 || ps.dimension % static_cast<std::size_t>(alpha) != 0) {
    throw std::invalid_argument("point set dimension is not divisible by alpha");
  }
  PointSet out;
  out.dimension = ps.dimension / static_cast<std::size_t>(alpha);
  out.points.reserve(ps.points.size());
  for (const auto& p : ps.points) out.points.push_back(interlace_point(p, alpha));
  return out;
}

DigitPoint interlaced_point(const GeneratingVector& gv, std::uint64_t n) {
  return interlace_point(classical_point(gv, n), gv.alpha);
}

void for_each_interlaced_point(const GeneratingVector& gv,
                               const std::function<void(std::uint64_t, const DigitPoint&)>& fn) {
  gv.validate();
  const std::uint64_t N = gv.num_points();
  for (std::uint64_t n = 0; n < N; ++n) fn(n, interlaced_point(gv, n));
}

std::vector<double> to_unit_float(const DigitPoint& p) {
  std::vector<double> y;
  y.reserve(p.coords.size());
  for (const auto& c : p.coords) y.push_back(c.value());
  return y;
}

}  // namespace hoqmc
