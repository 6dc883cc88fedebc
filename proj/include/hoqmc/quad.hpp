#pragma once

// Equal-weight QMC quadrature, test integrand families with known derivative
// structure, dimension truncation and empirical convergence studies.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hoqmc/pointgen.hpp"
#include "hoqmc/weights.hpp"

namespace hoqmc {

enum class IntegrandFamily { ProductExponential, RationalSpod, User };
enum class Provenance { ClosedForm, Quadrature, None };

std::string to_string(IntegrandFamily family);
std::string to_string(Provenance provenance);

struct Integrand {
  std::size_t dimension = 0;
  IntegrandFamily family = IntegrandFamily::User;
  std::function<double(std::span<const double>)> evaluator;
  /// Per-coordinate rates: c beta_j for product-exponential, b_j for rational-spod.
  std::vector<double> rates;
  /// Coordinates beyond `dimension` that were pinned by truncation.
  std::vector<double> pinned_rates;
  double offset = 0.0;  ///< c0 for rational-spod
  double anchor = 0.5;  ///< value the truncated coordinates are pinned at
  std::optional<double> reference;
  Provenance provenance = Provenance::None;

  double operator()(std::span<const double> y) const { return evaluator(y); }
};

/// g(y) = prod_j exp(c beta_j y_j) on [0,1]^s; integral prod_j (e^{c beta_j} - 1) / (c beta_j).
Integrand product_exponential(const BetaSequence& beta, std::size_t s, double c);

/// g(y) = 1 / (c0 - sum_j b_j y_j); throws std::domain_error if c0 <= sum_j b_j.
Integrand rational_spod(std::span<const double> b, double c0);
Integrand rational_spod(const BetaSequence& b, std::size_t s, double c0);

/// int_0^1 ... int_0^1 1/(c0 - sum_j b_j y_j) dy via its one-dimensional Laplace form
/// int_0^inf e^{-t c0} prod_j (e^{t b_j} - 1)/(t b_j) dt.
double rational_spod_integral(std::span<const double> b, double c0);

/// The first s_trunc coordinates of g with the rest pinned at g.anchor.
Integrand truncate_integrand(const Integrand& g, std::size_t s_trunc);

/// sup over the cube of |d g / d(sum_j b_j y_j)| for rational-spod, 1 / (c0 - sum_j b_j)^2.
double rational_spod_lipschitz(const Integrand& g);

/// (1/N) sum_n g(y_n), compensated.
double qmc_apply(const PointSet& ps, const Integrand& g);
/// Same over the interlaced rule of gv, streamed point by point.
double qmc_apply(const GeneratingVector& gv, const Integrand& g);

/// Root mean square error of `replicates` independent N-sample Monte Carlo estimates.
double monte_carlo_rms_error(const Integrand& g, std::uint64_t N, std::uint64_t seed, std::size_t replicates);

struct ConvergenceOptions {
  std::size_t exclude_smallest = 2;  ///< leading entries left out of the slope fit
  double clamp = 1e-14;              ///< errors below this are raised to it before fitting
  bool monte_carlo = false;
  std::uint64_t seed = 20240101;
  std::size_t mc_replicates = 32;
};

struct ConvergenceEntry {
  int m = 0;
  std::uint64_t N = 0;
  double estimate = 0.0;
  double error = 0.0;
  std::optional<double> mc_error;
  double cbc_ms = 0.0;
};

struct SlopeFit {
  std::optional<double> slope;  ///< empty when fewer than two usable points remain
  std::size_t points_used = 0;
};

struct ConvergenceRecord {
  std::vector<ConvergenceEntry> entries;
  std::optional<double> slope;
  std::optional<double> mc_slope;
  std::size_t points_used = 0;
  bool degenerate = false;  ///< every error vanished; no slope
  ConvergenceOptions options;
  WeightSpec spec;
  std::size_t s = 0;
};

/// Least squares slope of log(error) against log(N) over entries[exclude..],
/// zero errors dropped and tiny ones clamped.
SlopeFit fit_loglog_slope(std::span<const std::uint64_t> N, std::span<const double> errors,
                          std::size_t exclude_smallest, double clamp);

/// For each m: fast CBC for g.dimension blocks, interlaced rule, |I - Q_N|.
ConvergenceRecord convergence_study(const WeightSpec& spec, const Integrand& g, std::span<const int> m_list,
                                    const ConvergenceOptions& options = {});

}  // namespace hoqmc
