#include "hoqmc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hoqmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double two_pow_delta(int nu, int alpha) { return nu == alpha ? 2.0 : 1.0; }

BoundValue from_log(double log_value, bool exact = true) {
  BoundValue r;
  r.log_value = log_value;
  r.exact = exact;
  r.value = std::exp(log_value);
  r.status = std::isinf(r.value) ? BoundStatus::Overflow : BoundStatus::Finite;
  return r;
}

BoundValue divergent() {
  BoundValue r;
  r.value = kInf;
  r.log_value = kInf;
  r.status = BoundStatus::Divergent;
  return r;
}

void require_lambda(double lambda, int alpha) {
  if (!(lambda > 1.0 / alpha && lambda <= 1.0)) {
    throw std::domain_error("lambda must lie in (1/alpha, 1], got " + std::to_string(lambda));
  }
}

// Per-block polynomial coefficients c_j(nu) = 2^delta beta_j^nu, nu = 1..alpha (index 0 unused).
std::vector<double> order_coeffs(std::size_t j, const WeightSpec& spec) {
  std::vector<double> c(static_cast<std::size_t>(spec.alpha) + 1, 0.0);
  const double bj = spec.beta(j);
  double pw = 1.0;
  for (int nu = 1; nu <= spec.alpha; ++nu) {
    pw *= bj;
    c[static_cast<std::size_t>(nu)] = two_pow_delta(nu, spec.alpha) * pw;
  }
  return c;
}

// Multiply a polynomial in the total order |nu| by sum_nu coeffs[nu] z^nu.
std::vector<double> spod_extend(const std::vector<double>& poly, const std::vector<double>& coeffs) {
  const std::size_t alpha = coeffs.size() - 1;
  std::vector<double> out(poly.size() + alpha, 0.0);
  for (std::size_t l = 0; l < poly.size(); ++l) {
    if (poly[l] == 0.0) continue;
    for (std::size_t nu = 1; nu <= alpha; ++nu) out[l + nu] += poly[l] * coeffs[nu];
  }
  return out;
}

}  // namespace

double factorial(unsigned n) {
  if (n <= 20) {
    std::uint64_t r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return static_cast<double>(r);
  }
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0));
}

double power_tail_sum(double sigma, std::size_t s) {
  if (!(sigma > 1.0)) return kInf;
  constexpr std::size_t kHead = 64;
  double head = 0.0;
  std::size_t k = s + 1;
  for (; k < kHead; ++k) head += std::pow(static_cast<double>(k), -sigma);
  // Euler-Maclaurin for sum_{j >= k} j^-sigma
  const double K = static_cast<double>(k);
  const double s1 = sigma, s3 = sigma * (sigma + 1) * (sigma + 2);
  const double s5 = s3 * (sigma + 3) * (sigma + 4);
  const double tail = std::pow(K, 1.0 - sigma) / (sigma - 1.0) + 0.5 * std::pow(K, -sigma) +
                      s1 * std::pow(K, -sigma - 1.0) / 12.0 - s3 * std::pow(K, -sigma - 3.0) / 720.0 +
                      s5 * std::pow(K, -sigma - 5.0) / 30240.0;
  return head + tail;
}

// ---------------------------------------------------------------------------
// BetaSequence

BetaSequence BetaSequence::power(double c, double theta) {
  if (!(c > 0.0) || !(theta > 0.0)) throw std::invalid_argument("power-law beta needs c > 0, theta > 0");
  BetaSequence b;
  b.kind_ = Kind::Power;
  b.c_ = c;
  b.theta_ = theta;
  return b;
}

BetaSequence BetaSequence::list(std::vector<double> values) {
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("beta values must be finite and >= 0");
  }
  BetaSequence b;
  b.kind_ = Kind::List;
  b.values_ = std::move(values);
  return b;
}

BetaSequence BetaSequence::list_with_tail(std::vector<double> values, double c, double theta) {
  if (!(c > 0.0) || !(theta > 0.0)) throw std::invalid_argument("beta tail needs c > 0, theta > 0");
  BetaSequence b = list(std::move(values));
  b.c_ = c;
  b.theta_ = theta;
  return b;
}

double BetaSequence::operator()(std::size_t j) const {
  if (j == 0) throw std::out_of_range("beta is indexed from 1");
  if (kind_ == Kind::List && j <= values_.size()) return values_[j - 1];
  if (!has_tail()) return 0.0;
  return c_ * std::pow(static_cast<double>(j), -theta_);
}

bool BetaSequence::summable(double x) const { return !has_tail() || theta_ * x > 1.0; }

double BetaSequence::tail_power_sum(double x, std::size_t s) const {
  if (!(x > 0.0)) throw std::invalid_argument("power sum exponent must be positive");
  double head = 0.0;
  std::size_t listed = kind_ == Kind::List ? values_.size() : 0;
  for (std::size_t j = s + 1; j <= listed; ++j) head += std::pow(values_[j - 1], x);
  if (!has_tail()) return head;
  if (!summable(x)) return kInf;
  return head + std::pow(c_, x) * power_tail_sum(theta_ * x, std::max(s, listed));
}

bool BetaSequence::nonincreasing() const {
  for (std::size_t j = 1; j < values_.size(); ++j) {
    if (values_[j] > values_[j - 1]) return false;
  }
  if (kind_ == Kind::List && has_tail() && !values_.empty()) {
    return values_.back() >= (*this)(values_.size() + 1);
  }
  return true;
}

BetaSequence BetaSequence::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  BetaSequence b = *this;
  for (auto& v : b.values_) v *= factor;
  b.c_ *= factor;
  return b;
}

void WeightSpec::validate() const {
  if (alpha < 2) throw std::invalid_argument("alpha must be >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
}

// ---------------------------------------------------------------------------
// weights

int MultiIndex::order() const {
  int r = 0;
  for (const auto& [j, v] : nu) r += v;
  return r;
}

double hybrid_weight_term(const MultiIndex& nu, const WeightSpec& spec) {
  double prod_fact = 1.0, prod_beta = 1.0;
  unsigned spod_order = 0;
  for (const auto& [j, v] : nu.nu) {
    if (v < 1 || v > spec.alpha) throw std::invalid_argument("nu_j must lie in {1..alpha}");
    if (j <= spec.J) {
      prod_fact *= factorial(static_cast<unsigned>(v));
    } else {
      spod_order += static_cast<unsigned>(v);
    }
    prod_beta *= two_pow_delta(v, spec.alpha) * std::pow(spec.beta(j), v);
  }
  return prod_fact * factorial(spod_order) * prod_beta;
}

std::vector<std::size_t> u_of_v(std::span<const std::size_t> v, int alpha) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  std::vector<std::size_t> u;
  for (auto j : v) {
    if (j == 0) throw std::invalid_argument("coordinate indices are 1-based");
    u.push_back((j + static_cast<std::size_t>(alpha) - 1) / static_cast<std::size_t>(alpha));
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

double c_alpha_b(int alpha, PrimeBase b, bool use_prime) {
  if (alpha < 2) throw std::invalid_argument("C_{alpha,b} needs alpha >= 2");
  const double bd = b.value();
  const double two_sin = 2.0 * std::sin(std::numbers::pi / bd);
  double lead = 2.0 / std::pow(two_sin, alpha);
  for (int z = 1; z <= alpha - 1; ++z) lead = std::max(lead, 1.0 / std::pow(two_sin, z));
  const double mid = std::pow(1.0 + 1.0 / bd + 1.0 / (bd * (bd + 1.0)), alpha - 2);
  const double last = 3.0 + 2.0 / bd + (2.0 * bd + 1.0) / (bd - 1.0);
  const double c = lead * mid * last;
  return use_prime ? std::ldexp(c, alpha) : c;
}

double weight_scale(int alpha, PrimeBase b, bool use_prime) {
  return c_alpha_b(alpha, b, use_prime) * std::pow(static_cast<double>(b.value()), alpha * (alpha - 1) / 2.0);
}

double gamma_order_factor(std::size_t j, int nu_j, const WeightSpec& spec) {
  if (nu_j < 1 || nu_j > spec.alpha) throw std::invalid_argument("nu_j must lie in {1..alpha}");
  return weight_scale(spec.alpha, spec.b, spec.use_prime_constant) * two_pow_delta(nu_j, spec.alpha) *
         std::pow(spec.beta(j), nu_j);
}

double gamma_u(std::span<const std::size_t> u, const WeightSpec& spec) {
  double product_part = 1.0;
  std::vector<double> spod{1.0};
  for (auto j : u) {
    const auto c = order_coeffs(j, spec);
    if (j <= spec.J) {
      double g = 0.0;
      for (int nu = 1; nu <= spec.alpha; ++nu) g += factorial(static_cast<unsigned>(nu)) * c[static_cast<std::size_t>(nu)];
      product_part *= g;
    } else {
      spod = spod_extend(spod, c);
    }
  }
  double spod_part = 0.0;
  for (std::size_t l = 0; l < spod.size(); ++l) spod_part += factorial(static_cast<unsigned>(l)) * spod[l];
  return product_part * spod_part;
}

double gamma_tilde_v(std::span<const std::size_t> v, const WeightSpec& spec) {
  const auto u = u_of_v(v, spec.alpha);
  return std::pow(weight_scale(spec.alpha, spec.b, spec.use_prime_constant), static_cast<double>(u.size())) *
         gamma_u(u, spec);
}

LambdaAlpha choose_lambda_alpha(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p must lie in (0, 1]");
  return {p, static_cast<int>(std::floor(1.0 / p)) + 1};
}

double b_constant(int alpha, PrimeBase b, double lambda, bool use_prime) {
  require_lambda(lambda, alpha);
  const double bd = b.value();
  const double denom = std::pow(bd, alpha * lambda) - bd;
  if (!(denom > 0.0)) throw std::domain_error("b^{alpha lambda} - b must be positive");
  const double rho = (bd - 1.0) / denom;
  return weight_scale(alpha, b, use_prime) * std::pow(std::pow(1.0 + rho, alpha) - 1.0, 1.0 / lambda);
}

std::string to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Finite: return "finite";
    case BoundStatus::Overflow: return "overflow";
    case BoundStatus::Divergent: return "divergent";
  }
  return "unknown";
}

SmallnessResult smallness_condition(const WeightSpec& spec) {
  spec.validate();
  const double B = b_constant(spec.alpha, spec.b, spec.p, spec.use_prime_constant);
  SmallnessResult r{SmallnessResult::Status::Holds, spec.beta.power_sum(1.0),
                    1.0 / (2.0 * spec.alpha * std::max(B, 1.0))};
  if (std::isinf(r.beta_sum)) {
    r.status = SmallnessResult::Status::Divergent;
  } else if (!(r.beta_sum < r.threshold)) {
    r.status = SmallnessResult::Status::Violated;
  }
  return r;
}

BoundValue cbc_theoretical_bound(const WeightSpec& spec, int m, std::size_t d, double lambda,
                                 std::size_t max_exact_spod_dims) {
  spec.validate();
  require_lambda(lambda, spec.alpha);
  if (d == 0) throw std::invalid_argument("bound needs d >= 1");
  const double bd = spec.b.value();
  const double rho = (bd - 1.0) / (std::pow(bd, spec.alpha * lambda) - bd);
  const double scale = weight_scale(spec.alpha, spec.b, spec.use_prime_constant);
  const auto alpha = static_cast<std::size_t>(spec.alpha);
  const std::size_t s = (d + alpha - 1) / alpha;

  // Sum over v with u(v) = u of rho^{|v|} factorizes into per-block terms.
  auto block_factor = [&](std::size_t j) {
    const std::size_t width = j < s ? alpha : d - alpha * (s - 1);
    return std::pow(1.0 + rho, static_cast<double>(width)) - 1.0;
  };

  double product_part = 1.0;
  std::vector<std::size_t> spod_blocks;
  for (std::size_t j = 1; j <= s; ++j) {
    if (j <= spec.J) {
      const auto c = order_coeffs(j, spec);
      double g = 0.0;
      for (std::size_t nu = 1; nu <= alpha; ++nu) g += factorial(static_cast<unsigned>(nu)) * c[nu];
      product_part *= 1.0 + std::pow(scale * g, lambda) * block_factor(j);
    } else {
      spod_blocks.push_back(j);
    }
  }

  double spod_part = 0.0;
  bool exact = true;
  if (spod_blocks.size() <= max_exact_spod_dims) {
    // Depth-first over subsets w of the SPOD blocks, carrying the polynomial
    // in the total derivative order for the blocks chosen so far.
    std::vector<std::vector<double>> coeffs;
    for (auto j : spod_blocks) coeffs.push_back(order_coeffs(j, spec));
    std::function<void(std::size_t, const std::vector<double>&, double, double)> visit =
        [&](std::size_t k, const std::vector<double>& poly, double scale_pow, double rho_prod) {
          if (k == spod_blocks.size()) {
            double g = 0.0;
            for (std::size_t l = 0; l < poly.size(); ++l) g += factorial(static_cast<unsigned>(l)) * poly[l];
            spod_part += std::pow(scale_pow * g, lambda) * rho_prod;
            return;
          }
          visit(k + 1, poly, scale_pow, rho_prod);
          visit(k + 1, spod_extend(poly, coeffs[k]), scale_pow * scale,
                rho_prod * block_factor(spod_blocks[k]));
        };
    visit(0, {1.0}, 1.0, 1.0);
  } else {
    // Jensen: (sum_nu a_nu)^lambda <= sum_nu a_nu^lambda, which factorizes by total order.
    exact = false;
    std::vector<double> poly{1.0};
    for (auto j : spod_blocks) {
      const auto c = order_coeffs(j, spec);
      const double a = block_factor(j);
      std::vector<double> next(poly.size() + alpha, 0.0);
      for (std::size_t l = 0; l < poly.size(); ++l) {
        next[l] += poly[l];
        for (std::size_t nu = 1; nu <= alpha; ++nu) next[l + nu] += poly[l] * a * std::pow(scale * c[nu], lambda);
      }
      poly = std::move(next);
    }
    for (std::size_t l = 0; l < poly.size(); ++l) {
      spod_part += std::pow(factorial(static_cast<unsigned>(l)), lambda) * poly[l];
    }
  }

  const double total = product_part * spod_part - 1.0;
  if (!(total > 0.0)) {
    BoundValue r;
    r.value = 0.0;
    r.log_value = -kInf;
    r.exact = exact;
    return r;
  }
  if (std::isinf(total)) return divergent();
  const double N = std::pow(bd, m);
  return from_log((std::log(2.0 / (N - 1.0)) + std::log(total)) / lambda, exact);
}

BoundValue explicit_error_constant(const WeightSpec& spec, std::uint64_t N) {
  spec.validate();
  if (N < 2) throw std::invalid_argument("N must be >= 2");
  const double p = spec.p;
  const double B = b_constant(spec.alpha, spec.b, p, spec.use_prime_constant);
  const double beta_p = spec.beta.power_sum(p);
  if (std::isinf(beta_p)) return divergent();
  // d_j = 2 max(B,1) beta_{ceil(j/alpha)}: each beta_k appears alpha times.
  const double S = spec.alpha * std::pow(2.0 * std::max(B, 1.0), p) * beta_p;
  if (p == 1.0 && !(S < 1.0)) return divergent();

  const double a_star = factorial(static_cast<unsigned>(std::floor(1.0 / p)) + 1u);
  const double log_exp_part = std::pow(a_star, p) * S;

  // log of sum_l (l!)^{p-1} S^l, accumulated as a running log-sum-exp.
  double log_series = 0.0;  // l = 0 term is 1
  if (S > 0.0) {
    const double logS = std::log(S);
    double log_term = 0.0;
    constexpr std::size_t kMaxTerms = 200'000'000;
    std::size_t l = 1;
    for (; l < kMaxTerms; ++l) {
      log_term += (p - 1.0) * std::log(static_cast<double>(l)) + logS;
      const double hi = std::max(log_series, log_term);
      log_series = hi + std::log(std::exp(log_series - hi) + std::exp(log_term - hi));
      // Ratio of consecutive terms; once below 1 and shrinking, the tail is
      // bounded by a geometric series.
      const double ratio = std::pow(static_cast<double>(l + 1), p - 1.0) * S;
      if (ratio < 1.0) {
        const double log_tail = log_term + std::log(ratio / (1.0 - ratio));
        if (log_tail - log_series < std::log(1e-16)) break;
      }
    }
    if (l == kMaxTerms) return divergent();
  }
  return from_log((std::log(2.0 / (static_cast<double>(N) - 1.0)) + log_exp_part + log_series) / p);
}

std::size_t crossover_J(const BetaSequence& b_seq, double eps, double B_hol) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(B_hol >= 1.0)) throw std::invalid_argument("B_hol must be >= 1");
  if (!b_seq.summable(1.0)) throw std::domain_error("sequence is not summable");
  const double threshold = eps / (4.0 * B_hol);
  auto ok = [&](std::size_t s) { return b_seq.tail_power_sum(1.0, s) <= threshold; };
  if (ok(0)) return 0;
  std::size_t hi = 1;
  while (!ok(hi)) {
    if (hi > (std::size_t{1} << 40)) throw std::domain_error("crossover dimension exceeds 2^40");
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // !ok(lo)
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double truncation_bound(const BetaSequence& b_seq, double p, std::size_t s) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("truncation bound needs 0 < p < 1");
  if (s == 0) throw std::invalid_argument("truncation dimension must be >= 1");
  if (!b_seq.nonincreasing()) throw std::invalid_argument("truncation bound needs a nonincreasing sequence");
  const double r = 1.0 / p - 1.0;
  return std::min(1.0 / r, 1.0) * std::pow(b_seq.power_sum(p), 1.0 / p) * std::pow(static_cast<double>(s), -r);
}

ErrorBudget combined_error_budget(double truncation, double qmc, double pg_constant, double pg_h,
                                  double pg_t) {
  if (truncation < 0 || qmc < 0 || pg_constant < 0 || pg_h < 0 || pg_t < 0) {
    throw std::invalid_argument("error budget inputs must be nonnegative");
  }
  ErrorBudget e{truncation, qmc, pg_constant * std::pow(pg_h, pg_t), 0.0};
  e.total = e.truncation + e.qmc + e.discretization;
  return e;
}

}  // namespace hoqmc
