#include "hoqmc/gf_poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace hoqmc {

namespace {

void require_same_base(const GfPoly& a, const GfPoly& c) {
  if (a.base() != c.base()) {
    throw std::invalid_argument("polynomials over different prime fields");
  }
}

char digit_char(std::uint32_t d) {
  return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10));
}

int char_digit(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'z') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'Z') return ch - 'A' + 10;
  return -1;
}

}  // namespace

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

PrimeBase::PrimeBase(std::uint32_t b) : b_(b) {
  if (b > 251 || !is_prime(b)) {
    throw std::invalid_argument("base must be a prime in [2, 251], got " + std::to_string(b));
  }
}

std::uint64_t PrimeBase::pow(unsigned e) const {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 63) / b_) throw std::overflow_error("b^e exceeds 2^63");
    r *= b_;
  }
  return r;
}

std::uint32_t inverse_mod(std::uint32_t a, PrimeBase b) {
  const std::uint32_t p = b.value();
  a %= p;
  if (a == 0) throw std::domain_error("zero has no inverse in Z_b");
  // a^(p-2) mod p
  std::uint64_t r = 1, base = a;
  for (std::uint32_t e = p - 2; e > 0; e >>= 1) {
    if (e & 1u) r = r * base % p;
    base = base * base % p;
  }
  return static_cast<std::uint32_t>(r);
}

GfPoly::GfPoly(PrimeBase base, std::vector<std::uint32_t> coeffs)
    : base_(base), coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c %= base_.value();
  normalize();
}

void GfPoly::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

GfPoly GfPoly::monomial(PrimeBase base, unsigned degree, std::uint32_t coeff) {
  std::vector<std::uint32_t> c(degree + 1, 0);
  c[degree] = coeff;
  return GfPoly(base, std::move(c));
}

GfPoly GfPoly::from_index(PrimeBase base, std::uint64_t n) {
  std::vector<std::uint32_t> c;
  while (n > 0) {
    c.push_back(static_cast<std::uint32_t>(n % base.value()));
    n /= base.value();
  }
  return GfPoly(base, std::move(c));
}

std::uint64_t GfPoly::to_index() const {
  std::uint64_t n = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (n > (std::numeric_limits<std::uint64_t>::max() - *it) / base_.value()) {
      throw std::overflow_error("polynomial encoding exceeds 64 bits");
    }
    n = n * base_.value() + *it;
  }
  return n;
}

GfPoly GfPoly::parse(PrimeBase base, std::string_view digits) {
  if (digits.empty()) throw std::invalid_argument("empty polynomial digit string");
  std::vector<std::uint32_t> c(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const int d = char_digit(digits[i]);
    if (d < 0 || static_cast<std::uint32_t>(d) >= base.value()) {
      throw std::invalid_argument("invalid base-" + std::to_string(base.value()) +
                                  " digit string '" + std::string(digits) + "'");
    }
    c[digits.size() - 1 - i] = static_cast<std::uint32_t>(d);
  }
  return GfPoly(base, std::move(c));
}

std::string GfPoly::to_digit_string() const {
  if (base_.value() > 36) throw std::invalid_argument("digit strings support b <= 36 only");
  if (coeffs_.empty()) return "0";
  std::string s;
  s.reserve(coeffs_.size());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s.push_back(digit_char(*it));
  return s;
}

GfPoly operator+(const GfPoly& a, const GfPoly& c) {
  require_same_base(a, c);
  const std::uint32_t p = a.base().value();
  std::vector<std::uint32_t> r(std::max(a.coeffs().size(), c.coeffs().size()));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a.coeff(i) + c.coeff(i)) % p;
  return GfPoly(a.base(), std::move(r));
}

GfPoly operator-(const GfPoly& a, const GfPoly& c) {
  require_same_base(a, c);
  const std::uint32_t p = a.base().value();
  std::vector<std::uint32_t> r(std::max(a.coeffs().size(), c.coeffs().size()));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (a.coeff(i) + p - c.coeff(i)) % p;
  return GfPoly(a.base(), std::move(r));
}

GfPoly operator*(const GfPoly& a, const GfPoly& c) {
  require_same_base(a, c);
  if (a.is_zero() || c.is_zero()) return GfPoly(a.base());
  const std::uint64_t p = a.base().value();
  std::vector<std::uint64_t> acc(a.coeffs().size() + c.coeffs().size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    if (a.coeffs()[i] == 0) continue;
    for (std::size_t j = 0; j < c.coeffs().size(); ++j) {
      acc[i + j] = (acc[i + j] + std::uint64_t{a.coeffs()[i]} * c.coeffs()[j]) % p;
    }
  }
  return GfPoly(a.base(), std::vector<std::uint32_t>(acc.begin(), acc.end()));
}

std::pair<GfPoly, GfPoly> divmod(const GfPoly& a, const GfPoly& divisor) {
  require_same_base(a, divisor);
  if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
  const PrimeBase base = a.base();
  const std::uint64_t p = base.value();
  const int dd = divisor.degree();
  if (a.degree() < dd) return {GfPoly(base), a};

  std::vector<std::uint32_t> rem(a.coeffs().begin(), a.coeffs().end());
  std::vector<std::uint32_t> quot(rem.size() - dd, 0);
  const std::uint64_t inv_lead = inverse_mod(divisor.leading(), base);
  for (int k = static_cast<int>(rem.size()) - 1; k >= dd; --k) {
    const std::uint64_t f = rem[k] * inv_lead % p;
    if (f == 0) continue;
    quot[k - dd] = static_cast<std::uint32_t>(f);
    for (int i = 0; i <= dd; ++i) {
      const std::uint64_t sub = f * divisor.coeffs()[i] % p;
      rem[k - dd + i] = static_cast<std::uint32_t>((rem[k - dd + i] + p - sub) % p);
    }
  }
  return {GfPoly(base, std::move(quot)), GfPoly(base, std::move(rem))};
}

bool is_irreducible(const GfPoly& p) {
  const int m = p.degree();
  if (m < 1) throw std::invalid_argument("irreducibility is defined for degree >= 1");
  if (m == 1) return true;
  const PrimeBase base = p.base();
  for (int k = 1; k <= m / 2; ++k) {
    const std::uint64_t lower = base.pow(static_cast<unsigned>(k));
    for (std::uint64_t low = 0; low < lower; ++low) {
      // monic divisor x^k + (low as polynomial)
      const GfPoly d = GfPoly::from_index(base, lower + low);
      if (divmod(p, d).second.is_zero()) return false;
    }
  }
  return true;
}

Modulus::Modulus(GfPoly poly) : poly_(std::move(poly)) {
  if (poly_.degree() < 1 || !is_irreducible(poly_)) {
    throw std::invalid_argument("modulus must be irreducible of degree >= 1, got '" +
                                poly_.to_digit_string() + "'");
  }
}

GfPoly reduce(const GfPoly& a, const Modulus& P) {
  if (a.degree() < P.degree()) return a;
  return divmod(a, P.poly()).second;
}

GfPoly poly_mul_mod(const GfPoly& a, const GfPoly& c, const Modulus& P) {
  return reduce(a * c, P);
}

GfPoly poly_pow_mod(const GfPoly& a, std::uint64_t e, const Modulus& P) {
  GfPoly result = GfPoly::one(a.base());
  GfPoly sq = reduce(a, P);
  for (; e > 0; e >>= 1) {
    if (e & 1u) result = poly_mul_mod(result, sq, P);
    sq = poly_mul_mod(sq, sq, P);
  }
  return result;
}

Modulus find_irreducible(PrimeBase b, int m) {
  if (m < 1) throw std::invalid_argument("modulus degree must be >= 1");
  const std::uint64_t lead = b.pow(static_cast<unsigned>(m));
  for (std::uint64_t low = 0; low < lead; ++low) {
    GfPoly cand = GfPoly::from_index(b, lead + low);
    if (is_irreducible(cand)) return Modulus(std::move(cand));
  }
  throw std::logic_error("no irreducible polynomial found");  // unreachable
}

DigitVector::DigitVector(PrimeBase base, std::vector<std::uint8_t> digits)
    : base_(base), digits_(std::move(digits)) {
  for (auto d : digits_) {
    if (d >= base_.value()) throw std::invalid_argument("digit out of range for base");
  }
}

std::size_t DigitVector::leading_position() const noexcept {
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (digits_[i] != 0) return i + 1;
  }
  return 0;
}

double DigitVector::value() const {
  // Horner from the least significant digit keeps every partial value in [0,1).
  long double v = 0.0L;
  const long double b = base_.value();
  for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) v = (v + *it) / b;
  return static_cast<double>(v);
}

DigitVector laurent_digits(const GfPoly& n_poly, const GfPoly& q, const Modulus& P,
                           std::size_t precision) {
  if (precision < 1) throw std::invalid_argument("Laurent precision must be >= 1");
  const PrimeBase base = P.base();
  const std::uint64_t p = base.value();
  const int m = P.degree();
  const std::uint64_t inv_lead = inverse_mod(P.poly().leading(), base);

  // The polynomial part of n q / P has no negative powers; only the residue matters.
  GfPoly r = poly_mul_mod(n_poly, q, P);
  std::vector<std::uint32_t> rem(static_cast<std::size_t>(m) + 1, 0);
  for (std::size_t i = 0; i < r.coeffs().size(); ++i) rem[i] = r.coeffs()[i];

  std::vector<std::uint8_t> digits(precision, 0);
  for (std::size_t l = 0; l < precision; ++l) {
    // rem <- rem * x; the x^m coefficient becomes the next digit after division by P.
    for (int i = m; i > 0; --i) rem[i] = rem[i - 1];
    rem[0] = 0;
    const std::uint64_t t = rem[m] * inv_lead % p;
    digits[l] = static_cast<std::uint8_t>(t);
    if (t != 0) {
      for (int i = 0; i <= m; ++i) {
        const std::uint64_t sub = t * P.poly().coeffs()[i] % p;
        rem[i] = static_cast<std::uint32_t>((rem[i] + p - sub) % p);
      }
    }
  }
  return DigitVector(base, std::move(digits));
}

DigitVector v_m(const DigitVector& digits, std::size_t m) {
  if (digits.precision() < m) {
    throw std::invalid_argument("v_m needs at least m digits, have " +
                                std::to_string(digits.precision()));
  }
  auto d = digits.digits();
  return DigitVector(digits.base(), std::vector<std::uint8_t>(d.begin(), d.begin() + m));
}

GfPoly primitive_element(const Modulus& P) {
  const PrimeBase base = P.base();
  const std::uint64_t order = P.size() - 1;
  const auto factors = prime_factors(order);
  const GfPoly one = GfPoly::one(base);
  for (std::uint64_t enc = 1; enc <= order; ++enc) {
    const GfPoly g = GfPoly::from_index(base, enc);
    bool generator = true;
    for (auto r : factors) {
      if (poly_pow_mod(g, order / r, P) == one) {
        generator = false;
        break;
      }
    }
    if (generator) return g;
  }
  throw std::logic_error("multiplicative group has no generator");  // unreachable
}

}  // namespace hoqmc
