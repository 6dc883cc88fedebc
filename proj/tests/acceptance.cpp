// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hoqmc/cbc.hpp"
#include "hoqmc/quad.hpp"

using namespace hoqmc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Run {
  WeightSpec spec;
  int m;
  std::size_t s;
  CbcResult result;
};

double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

WeightSpec small_spec(int alpha, std::size_t J) {
  WeightSpec spec;
  spec.alpha = alpha;
  spec.b = PrimeBase(2);
  spec.J = J;
  spec.p = 0.55;
  spec.beta = BetaSequence::power(0.4, 2.0);
  return spec;
}

// The grid b = 2, m in {3,4,5}, alpha in {2,3}, s in {1,2,3}, J in {0,1,s}.
std::vector<Run> small_grid_runs() {
  std::vector<Run> runs;
  for (int m : {3, 4, 5}) {
    for (int alpha : {2, 3}) {
      for (std::size_t s = 1; s <= 3; ++s) {
        std::vector<std::size_t> Js{0, 1, s};
        std::sort(Js.begin(), Js.end());
        Js.erase(std::unique(Js.begin(), Js.end()), Js.end());
        for (auto J : Js) {
          const auto spec = small_spec(alpha, J);
          runs.push_back({spec, m, s, fast_cbc(spec, m, s)});
        }
      }
    }
  }
  return runs;
}

std::vector<Run> large_runs() {
  std::vector<Run> runs;
  for (std::size_t J : {0u, 4u, 16u}) {
    const auto spec = small_spec(2, J);
    runs.push_back({spec, 10, 16, fast_cbc(spec, 10, 16)});
  }
  return runs;
}

Outcome criterion_1(const std::vector<Run>& runs) {
  Outcome o;
  double worst = 0.0;
  std::size_t mismatched = 0;
  for (const auto& r : runs) {
    const auto slow = slow_cbc(r.spec, r.m, r.s);
    if (slow.gv.q != r.result.gv.q) ++mismatched;
    for (std::size_t d = 0; d < slow.E_per_step.size(); ++d) {
      worst = std::max(worst, rel_diff(slow.E_per_step[d], r.result.E_per_step[d]));
    }
  }
  o.pass = mismatched == 0 && worst <= 1e-9;
  o.detail = std::to_string(runs.size()) + " configurations, " + std::to_string(mismatched) +
             " vector mismatches, max rel E diff " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_2(const std::vector<Run>& runs) {
  Outcome o;
  double worst = 0.0;
  std::size_t checks = 0;
  for (const auto& r : runs) {
    const Modulus P = r.result.gv.modulus;
    FastCbc engine(r.spec, OmegaMatrix(P, r.spec.alpha), r.s);
    std::vector<GfPoly> q;
    while (!engine.done()) {
      const auto step = engine.step();
      q.push_back(GfPoly::from_index(r.spec.b, step.q));
      worst = std::max(worst, rel_diff(step.criterion, eval_E_direct(P, q, r.spec)));
      ++checks;
      if (step.d == 1) continue;
      for (std::uint64_t c = 1; c <= step.candidate_criteria.size(); ++c) {
        auto trial = q;
        trial.back() = GfPoly::from_index(r.spec.b, c);
        worst = std::max(worst, rel_diff(step.candidate_criteria[c - 1], eval_E_direct(P, trial, r.spec)));
        ++checks;
      }
    }
  }
  o.pass = worst <= 1e-9;
  o.detail = std::to_string(checks) + " criterion values, max rel diff " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_3(const std::vector<Run>& small, const std::vector<Run>& large) {
  Outcome o;
  std::size_t checks = 0, violations = 0, nonfinite = 0;
  double tightest = 0.0;
  auto check_run = [&](const Run& r) {
    const auto grid = default_lambda_grid(r.spec.alpha);
    for (std::size_t d = 1; d <= r.result.E_per_step.size(); ++d) {
      const double E = r.result.E_per_step[d - 1];
      for (double lambda : grid) {
        const auto bound = cbc_theoretical_bound(r.spec, r.m, d, lambda);
        ++checks;
        if (bound.status != BoundStatus::Finite) {
          ++nonfinite;
          continue;
        }
        if (E > bound.value * (1.0 + 1e-12)) ++violations;
        if (bound.value > 0) tightest = std::max(tightest, E / bound.value);
      }
    }
  };
  for (const auto& r : small) check_run(r);
  for (const auto& r : large) check_run(r);
  o.pass = violations == 0;
  o.detail = std::to_string(checks) + " (step, lambda) checks, " + std::to_string(violations) + " violations, " +
             std::to_string(nonfinite) + " overflowed bounds, max E/bound " + fmt("%.3g", tightest);
  return o;
}

Outcome criterion_4() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  std::size_t products = 0;
  auto run = [&](int b, int m) {
    const OmegaMatrix om(find_irreducible(PrimeBase(b), m), 2);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(om.size());
      for (auto& x : v) x = nd(rng);
      const auto fast = rader_multiply(om, v);
      const auto slow = om.multiply_naive(v);
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        diff = std::max(diff, std::fabs(fast[i] - slow[i]));
        scale = std::max(scale, std::fabs(slow[i]));
      }
      worst = std::max(worst, scale == 0.0 ? diff : diff / scale);
      ++products;
    }
  };
  for (int m = 1; m <= 8; ++m) run(2, m);
  for (int m = 1; m <= 5; ++m) run(3, m);
  o.pass = worst <= 1e-9;
  o.detail = std::to_string(products) + " products, max rel diff " + fmt("%.2e", worst);
  return o;
}

WeightSpec convergence_spec(int alpha) {
  WeightSpec spec;
  spec.alpha = alpha;
  spec.b = PrimeBase(2);
  spec.J = 8;
  spec.p = 0.55;
  spec.beta = BetaSequence::power(0.1, 2.0);
  return spec;
}

std::vector<int> convergence_ms() { return {6, 7, 8, 9, 10, 11, 12, 13}; }

Outcome criterion_5(ConvergenceRecord& rec2) {
  Outcome o;
  const auto spec = convergence_spec(2);
  const auto g = product_exponential(spec.beta, 8, 1.0);
  ConvergenceOptions opts;
  opts.monte_carlo = true;
  const auto ms = convergence_ms();
  rec2 = convergence_study(spec, g, ms, opts);
  const bool qmc_ok = rec2.slope && *rec2.slope <= -1.5;
  const bool mc_ok = rec2.mc_slope && *rec2.mc_slope >= -0.7 && *rec2.mc_slope <= -0.3;
  o.pass = qmc_ok && mc_ok;
  o.detail = "QMC slope " + (rec2.slope ? fmt("%.3f", *rec2.slope) : std::string("n/a")) + " (need <= -1.5), MC slope " +
             (rec2.mc_slope ? fmt("%.3f", *rec2.mc_slope) : std::string("n/a")) + " (need in [-0.7, -0.3])";
  return o;
}

Outcome criterion_6(const ConvergenceRecord& rec2) {
  Outcome o;
  const auto spec = convergence_spec(3);
  const auto g = product_exponential(spec.beta, 8, 1.0);
  const auto ms = convergence_ms();
  const auto rec3 = convergence_study(spec, g, ms);
  o.pass = rec3.slope && rec2.slope && *rec3.slope <= *rec2.slope + 0.3;
  o.detail = "alpha=3 slope " + (rec3.slope ? fmt("%.3f", *rec3.slope) : std::string("n/a")) + ", alpha=2 slope " +
             (rec2.slope ? fmt("%.3f", *rec2.slope) : std::string("n/a"));
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const auto b = BetaSequence::power(1.0, 3.0);
  // tails by backward summation to j = 10^6 plus the midpoint integral beyond
  long double tail = 1.0L / (2.0L * 1'000'000.5L * 1'000'000.5L);
  for (long j = 1'000'000; j > 100; --j) tail += 1.0L / (static_cast<long double>(j) * j * j);
  std::vector<long double> tails(101);
  for (std::size_t s = 100; s >= 1; --s) {
    tails[s] = tail;
    tail += 1.0L / (static_cast<long double>(s) * s * s);
  }
  std::size_t tail_fail = 0;
  double worst_tail = 0.0;
  for (std::size_t s = 1; s <= 100; ++s) {
    const double bound = truncation_bound(b, 0.5, s);
    if (static_cast<double>(tails[s]) > bound) ++tail_fail;
    worst_tail = std::max(worst_tail, static_cast<double>(tails[s]) / bound);
  }

  const auto g = rational_spod(b, 8, 3.0);
  const double L = rational_spod_lipschitz(g);
  std::size_t trunc_fail = 0;
  double worst_trunc = 0.0;
  for (std::size_t sp = 1; sp <= 8; ++sp) {
    const auto t = truncate_integrand(g, sp);
    const double err = std::fabs(*g.reference - *t.reference);
    const double bound = 0.5 * L * truncation_bound(b, 0.5, sp);
    if (err > bound) ++trunc_fail;
    worst_trunc = std::max(worst_trunc, err / bound);
  }
  o.pass = tail_fail == 0 && trunc_fail == 0;
  o.detail = "tail violations " + std::to_string(tail_fail) + "/100 (max tail/bound " + fmt("%.3g", worst_tail) +
             "), rational truncation violations " + std::to_string(trunc_fail) + "/8 (max err/bound " +
             fmt("%.3g", worst_trunc) + ")";
  return o;
}

Outcome criterion_8(const std::vector<Run>& small, const std::vector<Run>& large) {
  Outcome o;
  Integrand one;
  double worst = 0.0;
  std::size_t vectors = 0, bad_projections = 0;
  auto check = [&](const Run& r) {
    const auto& gv = r.result.gv;
    one.dimension = gv.s();
    one.evaluator = [](std::span<const double>) { return 1.0; };
    worst = std::max(worst, std::fabs(qmc_apply(gv, one) - 1.0));
    const std::uint64_t N = gv.num_points();
    if (N > 1024) return;
    ++vectors;
    const auto ps = classical_points(gv);
    for (std::size_t j = 0; j < gv.d(); ++j) {
      std::vector<std::uint64_t> k;
      for (const auto& p : ps.points) {
        std::uint64_t v = 0;
        for (auto digit : p.coords[j].digits()) v = v * gv.base().value() + digit;
        k.push_back(v);
      }
      std::sort(k.begin(), k.end());
      for (std::uint64_t i = 0; i < N; ++i) {
        if (k[i] != i) {
          ++bad_projections;
          break;
        }
      }
    }
  };
  for (const auto& r : small) check(r);
  for (const auto& r : large) check(r);
  o.pass = worst <= 1e-14 && bad_projections == 0;
  o.detail = "max |Q(1) - 1| " + fmt("%.2e", worst) + ", " + std::to_string(vectors) + " vectors, " +
             std::to_string(bad_projections) + " non-permutation projections";
  return o;
}

Outcome criterion_9(const std::vector<Run>& large) {
  Outcome o;
  bool search_constant = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::size_t blocks = 0;
  for (const auto& r : large) {
    const auto& c = r.result.counters;
    const auto J = r.result.J;
    const auto alpha = static_cast<std::size_t>(r.spec.alpha);
    const double N = static_cast<double>(r.result.gv.num_points());
    // search work of every product-regime component against the first
    for (std::size_t d = 1; d <= std::min(J * alpha, c.search_ops.size()); ++d) {
      search_constant = search_constant && c.search_ops[d - 1] == c.search_ops.front();
    }
    for (std::size_t s = 1; s <= r.s; ++s) {
      if (s <= J) {
        search_constant = search_constant && c.spod_update_ops[s - 1] == 0;
        continue;
      }
      const double model = static_cast<double>(alpha * alpha * (s - J)) * N;
      const double ratio = static_cast<double>(c.spod_update_ops[s - 1]) / model;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++blocks;
    }
  }
  o.pass = search_constant && blocks > 0 && lo >= 0.5 && hi <= 2.0;
  o.detail = std::string("product-regime search work ") + (search_constant ? "constant" : "NOT constant") + ", " +
             std::to_string(blocks) + " SPOD blocks with update/(alpha^2 (s-J) N) in [" + fmt("%.3f", lo) + ", " +
             fmt("%.3f", hi) + "]";
  return o;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("criterion %d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  const auto t0 = Clock::now();
  const auto small = small_grid_runs();
  const auto large = large_runs();
  std::printf("setup: %zu small and %zu large constructions [%.1f s]\n", small.size(), large.size(),
              std::chrono::duration<double>(Clock::now() - t0).count());

  ConvergenceRecord rec2;
  report(1, [&] { return criterion_1(small); });
  report(2, [&] { return criterion_2(small); });
  report(3, [&] { return criterion_3(small, large); });
  report(4, [&] { return criterion_4(); });
  report(5, [&] { return criterion_5(rec2); });
  report(6, [&] { return criterion_6(rec2); });
  report(7, [&] { return criterion_7(); });
  report(8, [&] { return criterion_8(small, large); });
  report(9, [&] { return criterion_9(large); });
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
