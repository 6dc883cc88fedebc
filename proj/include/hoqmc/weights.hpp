#pragma once

// Hybrid product/SPOD weights, the constants derived from them, and the
// theoretical error bound calculators used to check constructions.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hoqmc/gf_poly.hpp"

namespace hoqmc {

/// n! in double precision: exact integer arithmetic up to 20!, lgamma beyond.
double factorial(unsigned n);

/// sum_{j > s} j^-sigma for sigma > 1 (explicit head plus Euler-Maclaurin tail).
double power_tail_sum(double sigma, std::size_t s);

/// A positive sequence (beta_j)_{j>=1}: power law c * j^-theta, or an explicit
/// list optionally continued by a power-law tail (zero beyond the list otherwise).
class BetaSequence {
 public:
  enum class Kind { Power, List };

  static BetaSequence power(double c, double theta);
  static BetaSequence list(std::vector<double> values);
  static BetaSequence list_with_tail(std::vector<double> values, double c, double theta);

  Kind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double theta() const noexcept { return theta_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool has_tail() const noexcept { return kind_ == Kind::Power || c_ > 0.0; }

  /// beta_j for j >= 1.
  double operator()(std::size_t j) const;

  /// Whether sum_j beta_j^x converges.
  bool summable(double x) const;
  /// sum_{j > s} beta_j^x; +infinity when the series diverges.
  double tail_power_sum(double x, std::size_t s) const;
  double power_sum(double x) const { return tail_power_sum(x, 0); }
  bool nonincreasing() const;

  /// A copy with every term multiplied by factor > 0.
  BetaSequence scaled(double factor) const;

 private:
  Kind kind_ = Kind::List;
  std::vector<double> values_;
  double c_ = 0.0;
  double theta_ = 0.0;
};

struct WeightSpec {
  int alpha = 2;
  PrimeBase b{2};
  std::size_t J = 0;  ///< crossover dimension, E = {1..J}
  double p = 1.0;     ///< summability exponent of beta
  BetaSequence beta = BetaSequence::list({});
  bool use_prime_constant = true;  ///< C'_{alpha,b} = 2^alpha C_{alpha,b}

  void validate() const;
};

/// Derivative orders nu_j in {1..alpha} on a finite support.
struct MultiIndex {
  std::map<std::size_t, int> nu;

  int order() const;
};

/// One summand of the hybrid weight: nu_{u cap E}! |nu_{u cap E^c}|! prod 2^delta beta_j^nu_j.
double hybrid_weight_term(const MultiIndex& nu, const WeightSpec& spec);

/// {ceil(j / alpha) : j in v}, sorted and without duplicates.
std::vector<std::size_t> u_of_v(std::span<const std::size_t> v, int alpha);

double c_alpha_b(int alpha, PrimeBase b, bool use_prime);

/// C_{alpha,b}^{(')} * b^{alpha(alpha-1)/2}, the per-coordinate factor shared by
/// gamma_tilde and gamma_j(nu).
double weight_scale(int alpha, PrimeBase b, bool use_prime);

/// gamma_j(nu_j) = C' b^{alpha(alpha-1)/2} 2^{delta(nu_j,alpha)} beta_j^{nu_j}.
double gamma_order_factor(std::size_t j, int nu_j, const WeightSpec& spec);

/// Hybrid weight gamma_u for u subset of {1..s} (1-based), gamma_empty = 1.
double gamma_u(std::span<const std::size_t> u, const WeightSpec& spec);

/// (C')^{|u(v)|} gamma_{u(v)} b^{alpha(alpha-1)|u(v)|/2}.
double gamma_tilde_v(std::span<const std::size_t> v, const WeightSpec& spec);

struct LambdaAlpha {
  double lambda;
  int alpha;
};

/// lambda = p, alpha = floor(1/p) + 1; throws std::domain_error unless 0 < p <= 1.
LambdaAlpha choose_lambda_alpha(double p);

/// C' b^{alpha(alpha-1)/2} ((1 + (b-1)/(b^{alpha lambda} - b))^alpha - 1)^{1/lambda}.
double b_constant(int alpha, PrimeBase b, double lambda, bool use_prime);

enum class BoundStatus {
  Finite,     ///< value is the bound
  Overflow,   ///< finite but beyond double range; log_value is exact
  Divergent,  ///< an underlying series diverges
};

std::string to_string(BoundStatus status);

struct BoundValue {
  double value = 0.0;
  double log_value = 0.0;
  BoundStatus status = BoundStatus::Finite;
  bool exact = true;  ///< false when a Jensen upper bound replaced the exact sum
};

struct SmallnessResult {
  enum class Status { Holds, Violated, Divergent } status;
  double beta_sum;
  double threshold;

  bool holds() const noexcept { return status == Status::Holds; }
};

/// sum_j beta_j < 1 / (2 alpha max(B, 1)) with B evaluated at lambda = p.
SmallnessResult smallness_condition(const WeightSpec& spec);

/// Right-hand side of the CBC error bound for a generating vector of length d
/// built with N = b^m points, at the given lambda in (1/alpha, 1].
///
/// Subsets v of {1..d} are regrouped by their block set u(v); the product part
/// over E factorizes, the SPOD part is enumerated over subsets of E^c when it
/// has at most `max_exact_spod_dims` coordinates, and is replaced by its Jensen
/// upper bound (polynomial in s) beyond that.
BoundValue cbc_theoretical_bound(const WeightSpec& spec, int m, std::size_t d, double lambda,
                                 std::size_t max_exact_spod_dims = 24);

/// Explicit dimension-independent constant times the N^{-1/p} rate, evaluated
/// at N. Requires p > 1/alpha; for p = 1 the smallness condition must hold.
BoundValue explicit_error_constant(const WeightSpec& spec, std::uint64_t N);

/// Smallest s >= 0 with sum_{j>s} b_j <= eps / (4 B_hol).
std::size_t crossover_J(const BetaSequence& b_seq, double eps, double B_hol = 1.0);

/// min(1/(1/p - 1), 1) (sum_j b_j^p)^{1/p} s^{-(1/p - 1)} for 0 < p < 1.
double truncation_bound(const BetaSequence& b_seq, double p, std::size_t s);

struct ErrorBudget {
  double truncation;  ///< E_I
  double qmc;         ///< E_II
  double discretization;  ///< E_III = C h^t
  double total;
};

ErrorBudget combined_error_budget(double truncation, double qmc, double pg_constant, double pg_h,
                                  double pg_t);

}  // namespace hoqmc
