#pragma once

// Arithmetic over the prime field Z_b and the polynomial ring Z_b[x].
//
// Polynomials are stored little-endian (coefficient of x^i at index i) and
// kept canonical: the highest stored coefficient is nonzero, and the zero
// polynomial has no coefficients. A polynomial of degree < m is identified
// with the integer sum_i a_i b^i, which is also how QMC point indices n are
// turned into n(x).

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hoqmc {

/// A prime b with 2 <= b <= 251 (digits fit in one byte).
class PrimeBase {
 public:
  explicit PrimeBase(std::uint32_t b);

  std::uint32_t value() const noexcept { return b_; }

  /// b^e as an integer; throws std::overflow_error past 2^63.
  std::uint64_t pow(unsigned e) const;

  friend bool operator==(PrimeBase, PrimeBase) = default;

 private:
  std::uint32_t b_;
};

bool is_prime(std::uint64_t n) noexcept;

/// Multiplicative inverse of a nonzero a in Z_b.
std::uint32_t inverse_mod(std::uint32_t a, PrimeBase b);

class GfPoly {
 public:
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  explicit GfPoly(PrimeBase base) : base_(base) {}
  GfPoly(PrimeBase base, std::vector<std::uint32_t> coeffs);

  static GfPoly one(PrimeBase base) { return GfPoly(base, {1}); }
  static GfPoly monomial(PrimeBase base, unsigned degree, std::uint32_t coeff = 1);

  /// n(x) = sum_r eta_r x^r for n = sum_r eta_r b^r.
  static GfPoly from_index(PrimeBase base, std::uint64_t n);
  std::uint64_t to_index() const;

  /// Digit-string text form, highest degree first ("111" = x^2+x+1 over Z_2).
  static GfPoly parse(PrimeBase base, std::string_view digits);
  std::string to_digit_string() const;

  PrimeBase base() const noexcept { return base_; }
  int degree() const noexcept {
    return coeffs_.empty() ? kZeroDegree : static_cast<int>(coeffs_.size()) - 1;
  }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  std::uint32_t coeff(std::size_t i) const noexcept {
    return i < coeffs_.size() ? coeffs_[i] : 0;
  }
  std::uint32_t leading() const noexcept { return coeffs_.empty() ? 0 : coeffs_.back(); }
  std::span<const std::uint32_t> coeffs() const noexcept { return coeffs_; }

  friend bool operator==(const GfPoly&, const GfPoly&) = default;

 private:
  void normalize();

  PrimeBase base_;
  std::vector<std::uint32_t> coeffs_;
};

GfPoly operator+(const GfPoly& a, const GfPoly& c);
GfPoly operator-(const GfPoly& a, const GfPoly& c);
GfPoly operator*(const GfPoly& a, const GfPoly& c);

/// Coefficient-wise sum mod b; throws std::invalid_argument on base mismatch.
inline GfPoly poly_add(const GfPoly& a, const GfPoly& c) { return a + c; }

/// Quotient and remainder of a / divisor; divisor must be nonzero.
std::pair<GfPoly, GfPoly> divmod(const GfPoly& a, const GfPoly& divisor);

/// True iff p (deg >= 1) has no factorization into two polynomials of positive
/// degree. Trial division by every monic polynomial of degree <= deg(p)/2.
bool is_irreducible(const GfPoly& p);

/// An irreducible polynomial P of degree m >= 1, the modulus of a lattice rule.
class Modulus {
 public:
  /// Throws std::invalid_argument unless poly is irreducible with degree >= 1.
  explicit Modulus(GfPoly poly);

  const GfPoly& poly() const noexcept { return poly_; }
  int degree() const noexcept { return poly_.degree(); }
  PrimeBase base() const noexcept { return poly_.base(); }
  /// b^m, the number of residues (and of lattice points).
  std::uint64_t size() const { return base().pow(static_cast<unsigned>(degree())); }

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  GfPoly poly_;
};

GfPoly reduce(const GfPoly& a, const Modulus& P);
GfPoly poly_mul_mod(const GfPoly& a, const GfPoly& c, const Modulus& P);
GfPoly poly_pow_mod(const GfPoly& a, std::uint64_t e, const Modulus& P);

/// Lexicographically smallest monic irreducible polynomial of degree m, where
/// candidates are ordered by their integer encoding (constant term least
/// significant).
Modulus find_irreducible(PrimeBase b, int m);

/// Finite base-b digit expansion t_1 t_2 ... t_L representing sum t_l b^-l.
class DigitVector {
 public:
  explicit DigitVector(PrimeBase base) : base_(base) {}
  DigitVector(PrimeBase base, std::vector<std::uint8_t> digits);

  PrimeBase base() const noexcept { return base_; }
  std::size_t precision() const noexcept { return digits_.size(); }
  /// Digit t_l for 1 <= l <= precision.
  std::uint8_t digit(std::size_t l) const { return digits_.at(l - 1); }
  std::span<const std::uint8_t> digits() const noexcept { return digits_; }

  /// 1-based position of the first nonzero digit, 0 if all digits vanish.
  std::size_t leading_position() const noexcept;
  bool is_zero() const noexcept { return leading_position() == 0; }

  /// Nearest double to the represented value.
  double value() const;

  friend bool operator==(const DigitVector&, const DigitVector&) = default;

 private:
  PrimeBase base_;
  std::vector<std::uint8_t> digits_;
};

/// First L coefficients t_1..t_L of the Laurent expansion of
/// n(x) q(x) / P(x) in Z_b((x^-1)); t_l multiplies x^-l.
DigitVector laurent_digits(const GfPoly& n_poly, const GfPoly& q, const Modulus& P,
                           std::size_t precision);

/// Truncation to the first m digits; throws std::invalid_argument when the
/// input carries fewer than m digits.
DigitVector v_m(const DigitVector& digits, std::size_t m);

/// Smallest (by integer encoding) generator of the multiplicative group of
/// Z_b[x]/(P).
GfPoly primitive_element(const Modulus& P);

/// Distinct prime factors of n, ascending.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

}  // namespace hoqmc
