#pragma once

// The omega kernel of the CBC search criterion and the matrix-vector product
// with Omega = [omega(v_m(n(x) q(x) / P(x)))]_{n, q}, made circulant by the
// Rader permutation and evaluated with an FFT.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hoqmc/gf_poly.hpp"

namespace hoqmc {

/// Sum of the alpha largest digit positions of k's base-b expansion
/// (positions counted from 1 at the least significant digit); 0 for k = 0.
int mu_alpha(std::uint64_t k, int alpha, PrimeBase b);

/// omega(y) = (b-1)/(b^alpha-b) - b^{floor(log_b y)(alpha-1)} (b^alpha-1)/(b^alpha-b),
/// with floor(log_b y) read off the first nonzero digit and the power set to 0 at y = 0.
double omega(const DigitVector& y, int alpha);

/// omega at a value whose first nonzero digit sits at `leading_position`
/// (0 for y = 0).
double omega_at_position(std::size_t leading_position, int alpha, PrimeBase b);

/// Powers of a primitive element g of Z_b[x]/(P): exponent i <-> residue g^i,
/// residues identified with their integer encodings in 1..b^m-1.
class RaderPermutation {
 public:
  explicit RaderPermutation(const Modulus& P);

  const GfPoly& generator() const noexcept { return generator_; }
  std::size_t size() const noexcept { return power_.size(); }
  /// Encoding of g^i mod P.
  std::uint64_t residue(std::size_t i) const { return power_.at(i); }
  /// The exponent i with g^i = residue (residue in 1..b^m-1).
  std::size_t exponent(std::uint64_t residue) const { return log_.at(residue); }

 private:
  GfPoly generator_;
  std::vector<std::uint64_t> power_;
  std::vector<std::size_t> log_;
};

/// omega applied to the classical lattice coordinates v_m(n(x) q(x) / P(x)),
/// n = 1..b^m-1, for a fixed column polynomial q.
std::vector<double> build_omega(const Modulus& P, const GfPoly& q_col, int alpha);

/// Omega stored as the single circulant column c[j] = omega(v_m(g^j / P)) in
/// Rader order: with n = g^i and q = g^k, Omega[n][q] = c[(i + k) mod M],
/// M = b^m - 1. Immutable; multiply() may be called concurrently.
class OmegaMatrix {
 public:
  OmegaMatrix(const Modulus& P, int alpha);

  const Modulus& modulus() const noexcept { return modulus_; }
  int alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return column_.size(); }
  const RaderPermutation& rader() const noexcept { return *rader_; }
  std::span<const double> column() const noexcept { return column_; }
  /// omega(0), the value shared by the n = 0 point for every q.
  double omega_zero() const noexcept { return omega_zero_; }

  /// Entry for point index n and candidate q (both encodings in 1..M).
  double entry(std::uint64_t n, std::uint64_t q) const;

  /// out[k] = sum_i c[(i + k) mod M] x[i] for x indexed by exponents of n.
  std::vector<double> multiply_permuted(std::span<const double> x) const;

  /// Rader/FFT product: vec[n-1] for n = 1..M in, result[q-1] for q in G_{b,m} out.
  std::vector<double> multiply(std::span<const double> vec) const;

  /// Direct O(M^2) product with the same indexing as multiply().
  std::vector<double> multiply_naive(std::span<const double> vec) const;

  /// Copy with c[j] shifted by delta (fault injection for the self-test).
  OmegaMatrix with_perturbed_entry(std::size_t j, double delta) const;

 private:
  struct FftPlan;

  void prepare_fft();

  Modulus modulus_;
  int alpha_;
  double omega_zero_;
  std::shared_ptr<const RaderPermutation> rader_;
  std::vector<double> column_;
  std::shared_ptr<const FftPlan> fft_;
};

/// rader_multiply: FFT-based Omega * vec (see OmegaMatrix::multiply).
inline std::vector<double> rader_multiply(const OmegaMatrix& omega, std::span<const double> vec) {
  return omega.multiply(vec);
}

}  // namespace hoqmc
