#include "hoqmc/quad.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hoqmc/cbc.hpp"
#include "hoqmc/summation.hpp"

namespace hoqmc {

std::string to_string(IntegrandFamily family) {
  switch (family) {
    case IntegrandFamily::ProductExponential: return "product-exponential";
    case IntegrandFamily::RationalSpod: return "rational-spod";
    case IntegrandFamily::User: return "user";
  }
  return "user";
}

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Quadrature: return "quadrature";
    case Provenance::None: return "none";
  }
  return "none";
}

namespace {

// (e^a - 1)/a, 1 at a = 0
double expm1_ratio(double a) { return a == 0.0 ? 1.0 : std::expm1(a) / a; }

double product_exponential_integral(std::span<const double> rates, std::span<const double> pinned, double anchor) {
  long double I = 1.0L;
  for (double a : rates) I *= expm1_ratio(a);
  for (double a : pinned) I *= std::exp(static_cast<long double>(a) * anchor);
  return static_cast<double>(I);
}

Integrand make_product_exponential(std::vector<double> rates, std::vector<double> pinned, double anchor) {
  Integrand g;
  g.dimension = rates.size();
  g.family = IntegrandFamily::ProductExponential;
  double pinned_sum = 0.0;
  for (double a : pinned) pinned_sum += a * anchor;
  g.evaluator = [rates, pinned_sum](std::span<const double> y) {
    double e = pinned_sum;
    for (std::size_t j = 0; j < rates.size(); ++j) e += rates[j] * y[j];
    return std::exp(e);
  };
  g.reference = product_exponential_integral(rates, pinned, anchor);
  g.provenance = Provenance::ClosedForm;
  g.rates = std::move(rates);
  g.pinned_rates = std::move(pinned);
  g.anchor = anchor;
  return g;
}

Integrand make_rational_spod(std::vector<double> rates, std::vector<double> pinned, double c0, double anchor) {
  double total = 0.0;
  for (double b : rates) {
    if (!(b >= 0.0)) throw std::domain_error("rational-spod rates must be nonnegative");
    total += b;
  }
  double pinned_sum = 0.0;
  for (double b : pinned) {
    total += b;
    pinned_sum += b * anchor;
  }
  if (!(c0 > total)) throw std::domain_error("rational-spod pole inside the cube: c0 <= sum of b_j");

  Integrand g;
  g.dimension = rates.size();
  g.family = IntegrandFamily::RationalSpod;
  const double shifted = c0 - pinned_sum;
  g.evaluator = [rates, shifted](std::span<const double> y) {
    double t = shifted;
    for (std::size_t j = 0; j < rates.size(); ++j) t -= rates[j] * y[j];
    return 1.0 / t;
  };
  bool all_zero = true;
  for (double b : rates) all_zero = all_zero && b == 0.0;
  if (all_zero) {
    g.reference = 1.0 / shifted;
    g.provenance = Provenance::ClosedForm;
  } else if (rates.size() == 1) {
    g.reference = std::log(shifted / (shifted - rates[0])) / rates[0];
    g.provenance = Provenance::ClosedForm;
  } else {
    g.reference = rational_spod_integral(rates, shifted);
    g.provenance = Provenance::Quadrature;
  }
  g.rates = std::move(rates);
  g.pinned_rates = std::move(pinned);
  g.offset = c0;
  g.anchor = anchor;
  return g;
}

}  // namespace

Integrand product_exponential(const BetaSequence& beta, std::size_t s, double c) {
  std::vector<double> rates(s);
  for (std::size_t j = 0; j < s; ++j) {
    rates[j] = c * beta(j + 1);
    if (!std::isfinite(rates[j])) throw std::domain_error("product-exponential rate c*beta_j is not finite");
  }
  return make_product_exponential(std::move(rates), {}, 0.5);
}

Integrand rational_spod(std::span<const double> b, double c0) {
  return make_rational_spod(std::vector<double>(b.begin(), b.end()), {}, c0, 0.5);
}

Integrand rational_spod(const BetaSequence& b, std::size_t s, double c0) {
  std::vector<double> rates(s);
  for (std::size_t j = 0; j < s; ++j) rates[j] = b(j + 1);
  return make_rational_spod(std::move(rates), {}, c0, 0.5);
}

double rational_spod_integral(std::span<const double> b, double c0) {
  double total = 0.0;
  for (double x : b) total += x;
  if (!(c0 > total)) throw std::domain_error("rational-spod pole inside the cube: c0 <= sum of b_j");
  // the integrand decays like e^{-t (c0 - sum b)} / t^k
  const std::vector<long double> rates(b.begin(), b.end());
  const long double c = c0;
  auto f = [&](long double t) -> long double {
    if (!std::isfinite(t)) return 0.0L;
    long double log_v = -t * c;
    for (long double r : rates) {
      const long double a = t * r;
      if (a == 0.0L) continue;
      // log((e^a - 1)/a) without overflow
      log_v += a > 30.0L ? a - std::log(a) + std::log1p(-std::exp(-a)) : std::log(std::expm1(a) / a);
    }
    return std::exp(log_v);
  };
  boost::math::quadrature::exp_sinh<long double> integrator;
  return static_cast<double>(integrator.integrate(f, 1e-15L));
}

Integrand truncate_integrand(const Integrand& g, std::size_t s_trunc) {
  if (s_trunc > g.dimension) throw std::invalid_argument("truncation dimension exceeds the integrand dimension");
  if (s_trunc == g.dimension) return g;
  std::vector<double> kept(g.rates.begin(), g.rates.begin() + static_cast<std::ptrdiff_t>(s_trunc));
  std::vector<double> pinned(g.rates.begin() + static_cast<std::ptrdiff_t>(s_trunc), g.rates.end());
  pinned.insert(pinned.end(), g.pinned_rates.begin(), g.pinned_rates.end());
  switch (g.family) {
    case IntegrandFamily::ProductExponential:
      return make_product_exponential(std::move(kept), std::move(pinned), g.anchor);
    case IntegrandFamily::RationalSpod:
      return make_rational_spod(std::move(kept), std::move(pinned), g.offset, g.anchor);
    case IntegrandFamily::User: break;
  }
  Integrand t;
  t.dimension = s_trunc;
  t.family = IntegrandFamily::User;
  t.anchor = g.anchor;
  t.evaluator = [inner = g.evaluator, full = g.dimension, anchor = g.anchor](std::span<const double> y) {
    std::vector<double> z(full, anchor);
    std::copy(y.begin(), y.end(), z.begin());
    return inner(z);
  };
  return t;
}

double rational_spod_lipschitz(const Integrand& g) {
  if (g.family != IntegrandFamily::RationalSpod) throw std::invalid_argument("not a rational-spod integrand");
  double total = 0.0;
  for (double b : g.rates) total += b;
  for (double b : g.pinned_rates) total += b;
  const double gap = g.offset - total;
  return 1.0 / (gap * gap);
}

double qmc_apply(const PointSet& ps, const Integrand& g) {
  if (ps.dimension != g.dimension) throw std::invalid_argument("point set and integrand dimensions differ");
  if (ps.points.empty()) throw std::invalid_argument("empty point set");
  CompensatedSum acc;
  for (const auto& p : ps.points) acc.add(g(to_unit_float(p)));
  return acc.value() / static_cast<double>(ps.points.size());
}

double qmc_apply(const GeneratingVector& gv, const Integrand& g) {
  if (gv.s() != g.dimension) throw std::invalid_argument("rule and integrand dimensions differ");
  CompensatedSum acc;
  for_each_interlaced_point(gv, [&](std::uint64_t, const DigitPoint& p) { acc.add(g(to_unit_float(p))); });
  return acc.value() / static_cast<double>(gv.num_points());
}

double monte_carlo_rms_error(const Integrand& g, std::uint64_t N, std::uint64_t seed, std::size_t replicates) {
  if (!g.reference) throw std::invalid_argument("integrand has no reference integral");
  if (N == 0 || replicates == 0) throw std::invalid_argument("Monte Carlo needs N >= 1 and replicates >= 1");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> y(g.dimension);
  long double sq = 0.0L;
  for (std::size_t r = 0; r < replicates; ++r) {
    std::seed_seq seq{seed, N, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    CompensatedSum acc;
    for (std::uint64_t n = 0; n < N; ++n) {
      for (auto& v : y) v = unif(rng);
      acc.add(g(y));
    }
    const double e = acc.value() / static_cast<double>(N) - *g.reference;
    sq += static_cast<long double>(e) * e;
  }
  return static_cast<double>(std::sqrt(sq / static_cast<long double>(replicates)));
}

SlopeFit fit_loglog_slope(std::span<const std::uint64_t> N, std::span<const double> errors,
                          std::size_t exclude_smallest, double clamp) {
  if (N.size() != errors.size()) throw std::invalid_argument("slope fit: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = exclude_smallest; i < N.size(); ++i) {
    if (errors[i] == 0.0) continue;
    xs.push_back(std::log(static_cast<double>(N[i])));
    ys.push_back(std::log(std::max(std::fabs(errors[i]), clamp)));
  }
  SlopeFit fit;
  fit.points_used = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.slope = sxy / sxx;
  return fit;
}

ConvergenceRecord convergence_study(const WeightSpec& spec, const Integrand& g, std::span<const int> m_list,
                                    const ConvergenceOptions& options) {
  if (!g.reference) throw std::invalid_argument("integrand has no reference integral");
  if (m_list.empty()) throw std::invalid_argument("empty m list");
  for (std::size_t i = 1; i < m_list.size(); ++i) {
    if (m_list[i] <= m_list[i - 1]) throw std::invalid_argument("m list must be strictly increasing");
  }
  ConvergenceRecord rec;
  rec.options = options;
  rec.spec = spec;
  rec.s = g.dimension;
  for (int m : m_list) {
    const auto cbc = fast_cbc(spec, m, g.dimension);
    ConvergenceEntry e;
    e.m = m;
    e.N = cbc.gv.num_points();
    e.cbc_ms = cbc.elapsed_ms;
    e.estimate = qmc_apply(cbc.gv, g);
    e.error = std::fabs(e.estimate - *g.reference);
    if (options.monte_carlo) e.mc_error = monte_carlo_rms_error(g, e.N, options.seed, options.mc_replicates);
    rec.entries.push_back(e);
  }

  std::vector<std::uint64_t> Ns;
  std::vector<double> errs, mc;
  for (const auto& e : rec.entries) {
    Ns.push_back(e.N);
    errs.push_back(e.error);
    if (e.mc_error) mc.push_back(*e.mc_error);
  }
  // too few entries to drop the pre-asymptotic ones: fit them all
  const std::size_t exclude = Ns.size() >= options.exclude_smallest + 2 ? options.exclude_smallest : 0;
  const auto fit = fit_loglog_slope(Ns, errs, exclude, options.clamp);
  rec.slope = fit.slope;
  rec.points_used = fit.points_used;
  rec.degenerate = std::all_of(errs.begin(), errs.end(), [](double e) { return e == 0.0; });
  if (options.monte_carlo) rec.mc_slope = fit_loglog_slope(Ns, mc, exclude, options.clamp).slope;
  return rec;
}

}  // namespace hoqmc
