#include "cli_commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

namespace hoqmc::cli {

namespace {

template <class T>
T integer_field(const Json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw UsageError(key + ": expected an integer");
  if constexpr (std::is_unsigned_v<T>) {
    if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) return v.get<T>();
    throw UsageError(key + ": must be nonnegative");
  } else {
    return v.get<T>();
  }
}

double number_field(const Json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw UsageError(key + ": expected a number");
  return v.get<double>();
}

bool bool_field(const Json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw UsageError(key + ": expected true or false");
  return v.get<bool>();
}

std::string string_field(const Json& j, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw UsageError(key + ": expected a string");
  return v.get<std::string>();
}

BetaSequence beta_of(const RunConfig& cfg) { return BetaSequence::power(cfg.beta_c, cfg.beta_theta); }

// J from the flag, else from eps via crossover_J, else 0
std::size_t resolve_J(RunConfig& cfg) {
  if (!cfg.J && cfg.eps) {
    cfg.J = crossover_J(beta_of(cfg), *cfg.eps, cfg.b_hol);
    std::cerr << "J = " << *cfg.J << " (crossover for eps = " << *cfg.eps << ")\n";
  }
  return cfg.J.value_or(0);
}

WeightSpec spec_of(const RunConfig& cfg) {
  WeightSpec spec;
  spec.alpha = cfg.alpha;
  spec.b = PrimeBase(cfg.b);
  spec.J = cfg.J.value_or(0);
  spec.p = cfg.p;
  spec.beta = beta_of(cfg);
  spec.use_prime_constant = cfg.use_prime_constant;
  return spec;
}

std::vector<double> lambda_grid_of(const RunConfig& cfg) {
  return cfg.lambda_grid.empty() ? default_lambda_grid(cfg.alpha) : cfg.lambda_grid;
}

std::string format_of(const RunConfig& cfg, const std::string& fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(cfg.out, text);
  }
}

Json bound_value_json(const BoundValue& v) {
  Json j{{"status", to_string(v.status)}, {"log_value", v.log_value}, {"exact", v.exact}};
  j["value"] = v.status == BoundStatus::Finite ? Json(v.value) : Json(nullptr);
  return j;
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Integrand integrand_of(const RunConfig& cfg) {
  if (cfg.family == "product-exponential") return product_exponential(beta_of(cfg), cfg.s, cfg.c);
  if (cfg.family == "rational-spod") return rational_spod(beta_of(cfg), cfg.s, cfg.c0);
  Integrand g;
  g.dimension = cfg.s;
  g.evaluator = [](std::span<const double>) { return 1.0; };
  g.reference = 1.0;
  g.provenance = Provenance::ClosedForm;
  return g;
}

}  // namespace

std::vector<int> parse_m_range(const std::string& text) {
  std::vector<int> ms;
  try {
    if (const auto colon = text.find(':'); colon != std::string::npos) {
      const int lo = std::stoi(text.substr(0, colon));
      const int hi = std::stoi(text.substr(colon + 1));
      for (int m = lo; m <= hi; ++m) ms.push_back(m);
    } else {
      std::stringstream in(text);
      std::string item;
      while (std::getline(in, item, ',')) ms.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("m_range: cannot parse '" + text + "'");
  }
  if (ms.empty()) throw UsageError("m_range: empty");
  return ms;
}

void apply_json(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "b") {
      cfg.b = integer_field<std::uint32_t>(j, key);
    } else if (key == "m") {
      cfg.m = integer_field<int>(j, key);
    } else if (key == "alpha") {
      cfg.alpha = integer_field<int>(j, key);
    } else if (key == "s") {
      cfg.s = integer_field<std::size_t>(j, key);
    } else if (key == "J") {
      if (value.is_null()) {
        cfg.J.reset();
      } else {
        cfg.J = integer_field<std::size_t>(j, key);
      }
    } else if (key == "p") {
      cfg.p = number_field(j, key);
    } else if (key == "beta_c") {
      cfg.beta_c = number_field(j, key);
    } else if (key == "beta_theta") {
      cfg.beta_theta = number_field(j, key);
    } else if (key == "eps") {
      if (value.is_null()) {
        cfg.eps.reset();
      } else {
        cfg.eps = number_field(j, key);
      }
    } else if (key == "b_hol") {
      cfg.b_hol = number_field(j, key);
    } else if (key == "use_prime_constant") {
      cfg.use_prime_constant = bool_field(j, key);
    } else if (key == "lambda_grid") {
      if (!value.is_array()) throw UsageError("lambda_grid: expected an array of numbers");
      cfg.lambda_grid.clear();
      for (const auto& x : value) {
        if (!x.is_number()) throw UsageError("lambda_grid: expected an array of numbers");
        cfg.lambda_grid.push_back(x.get<double>());
      }
    } else if (key == "family") {
      cfg.family = string_field(j, key);
    } else if (key == "c") {
      cfg.c = number_field(j, key);
    } else if (key == "c0") {
      cfg.c0 = number_field(j, key);
    } else if (key == "m_range") {
      if (value.is_string()) {
        cfg.m_range = parse_m_range(value.get<std::string>());
      } else if (value.is_array()) {
        cfg.m_range.clear();
        for (const auto& x : value) {
          if (!x.is_number_integer()) throw UsageError("m_range: expected integers");
          cfg.m_range.push_back(x.get<int>());
        }
      } else {
        throw UsageError("m_range: expected \"lo:hi\" or an array of integers");
      }
    } else if (key == "gv") {
      cfg.gv = string_field(j, key);
    } else if (key == "out") {
      cfg.out = string_field(j, key);
    } else if (key == "format") {
      cfg.format = string_field(j, key);
    } else if (key == "seed") {
      cfg.seed = integer_field<std::uint64_t>(j, key);
    } else if (key == "mc_baseline") {
      cfg.mc_baseline = bool_field(j, key);
    } else if (key == "mc_replicates") {
      cfg.mc_replicates = integer_field<std::size_t>(j, key);
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
}

void validate(const RunConfig& cfg) {
  const auto& cmd = cfg.command;
  if (cmd == "selftest") return;
  if (cmd == "points") {
    if (cfg.gv.empty()) throw UsageError("gv: input generating vector file required");
    const auto f = format_of(cfg, "csv");
    if (f != "csv" && f != "digits" && f != "json") throw UsageError("format: expected json, csv or digits");
    return;
  }
  try {
    PrimeBase{cfg.b};
  } catch (const std::exception&) {
    throw UsageError("b: must be a prime");
  }
  if (cfg.m < 1 || std::pow(static_cast<double>(cfg.b), cfg.m) > 1 << 24) {
    throw UsageError("m: need m >= 1 and b^m <= 2^24");
  }
  if (cfg.alpha < 2 || cfg.alpha > 8) throw UsageError("alpha: must lie in 2..8");
  if (cfg.s < 1) throw UsageError("s: must be >= 1");
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw UsageError("p: must lie in (0, 1]");
  if (!(cfg.beta_c > 0.0)) throw UsageError("beta_c: must be positive");
  if (!(cfg.beta_theta > 0.0)) throw UsageError("beta_theta: must be positive");
  if (cfg.eps && !(*cfg.eps > 0.0)) throw UsageError("eps: must be positive");
  if (!(cfg.b_hol >= 1.0)) throw UsageError("b_hol: must be >= 1");
  for (double l : cfg.lambda_grid) {
    if (!(l > 1.0 / cfg.alpha && l <= 1.0)) throw UsageError("lambda_grid: every lambda must lie in (1/alpha, 1]");
  }
  for (std::size_t i = 0; i < cfg.m_range.size(); ++i) {
    if (cfg.m_range[i] < 1) throw UsageError("m_range: entries must be >= 1");
    if (std::pow(static_cast<double>(cfg.b), cfg.m_range[i]) > 1 << 24) {
      throw UsageError("m_range: b^m must not exceed 2^24");
    }
    if (i > 0 && cfg.m_range[i] <= cfg.m_range[i - 1]) throw UsageError("m_range: must be strictly increasing");
  }
  if (cmd == "construct" && format_of(cfg, "json") != "json") throw UsageError("format: construct writes json");
  if (cmd == "bounds") {
    const auto f = format_of(cfg, "json");
    if (f != "json" && f != "csv") throw UsageError("format: bounds writes json or csv");
  }
  if (cmd == "converge") {
    if (cfg.family != "product-exponential" && cfg.family != "rational-spod" && cfg.family != "constant") {
      throw UsageError("family: expected product-exponential, rational-spod or constant");
    }
    if (format_of(cfg, "csv") != "csv") throw UsageError("format: converge writes csv");
    if (cfg.mc_baseline && cfg.mc_replicates < 1) throw UsageError("mc_replicates: must be >= 1");
  }
}

Json to_json(const RunConfig& cfg) {
  Json j{{"command", cfg.command}};
  if (cfg.command == "points") {
    j["gv"] = cfg.gv;
    j["format"] = format_of(cfg, "csv");
    return j;
  }
  j["b"] = cfg.b;
  j["m"] = cfg.m;
  j["alpha"] = cfg.alpha;
  j["s"] = cfg.s;
  j["J"] = cfg.J ? Json(*cfg.J) : Json(nullptr);
  j["p"] = cfg.p;
  j["beta_c"] = cfg.beta_c;
  j["beta_theta"] = cfg.beta_theta;
  j["eps"] = cfg.eps ? Json(*cfg.eps) : Json(nullptr);
  j["b_hol"] = cfg.b_hol;
  j["use_prime_constant"] = cfg.use_prime_constant;
  j["lambda_grid"] = cfg.lambda_grid.empty() ? default_lambda_grid(cfg.alpha) : cfg.lambda_grid;
  if (cfg.command == "converge") {
    j["family"] = cfg.family;
    j["c"] = cfg.c;
    j["c0"] = cfg.c0;
    j["mc_baseline"] = cfg.mc_baseline;
    j["seed"] = cfg.seed;
    j["mc_replicates"] = cfg.mc_replicates;
  }
  if (cfg.command == "converge" || cfg.command == "bounds") j["m_range"] = cfg.m_range;
  return j;
}

int cmd_construct(RunConfig cfg) {
  resolve_J(cfg);
  const auto spec = spec_of(cfg);
  const auto result = fast_cbc(spec, cfg.m, cfg.s);
  const auto check = verify_bound(result, spec, lambda_grid_of(cfg));
  emit(cfg, gv_to_json(result.gv).dump(2) + "\n");
  if (!cfg.out.empty()) {
    write_text_file(sidecar_path(cfg.out, ".cbc.json"), cbc_sidecar(result, check, to_json(cfg)).dump(2) + "\n");
  }
  std::cerr << "E = " << csv_number(result.E_per_step.back()) << ", bound check "
            << (check.all_hold ? "holds" : "FAILS") << " on " << check.entries.size() << " lambda values\n";
  return check.all_hold ? kOk : kNumerical;
}

int cmd_points(const RunConfig& cfg) {
  const auto gv = gv_from_json(read_json_file(cfg.gv));
  const auto ps = interlace_points(classical_points(gv), gv.alpha);
  const auto format = format_of(cfg, "csv");
  std::ostringstream out;
  if (format == "csv") {
    write_points_csv(out, ps);
  } else if (format == "digits") {
    write_points_digits(out, ps);
  } else {
    Json rows = Json::array();
    for (const auto& p : ps.points) rows.push_back(to_unit_float(p));
    out << Json{{"generating_vector", gv_to_json(gv)}, {"points", std::move(rows)}}.dump() << "\n";
  }
  emit(cfg, out.str());
  if (!cfg.out.empty()) {
    const Json meta{{"config", to_json(cfg)}, {"generating_vector", gv_to_json(gv)}, {"rows", ps.points.size()}};
    write_text_file(sidecar_path(cfg.out, ".meta.json"), meta.dump(2) + "\n");
  }
  return kOk;
}

int cmd_bounds(RunConfig cfg) {
  resolve_J(cfg);
  const auto spec = spec_of(cfg);
  const auto d = static_cast<std::size_t>(cfg.alpha) * cfg.s;
  std::vector<std::string> warnings;

  Json cbc = Json::array();
  for (double lambda : lambda_grid_of(cfg)) {
    auto row = bound_value_json(cbc_theoretical_bound(spec, cfg.m, d, lambda));
    row["lambda"] = lambda;
    cbc.push_back(std::move(row));
  }

  Json truncation = Json::array();
  if (cfg.p < 1.0) {
    for (std::size_t s = 1; s <= cfg.s; ++s) {
      truncation.push_back(Json{{"s", s}, {"bound", truncation_bound(spec.beta, cfg.p, s)}});
    }
  } else {
    warnings.push_back("truncation bound needs p < 1; table omitted");
  }

  const auto small = smallness_condition(spec);
  if (cfg.p == 1.0 && !small.holds()) warnings.push_back("smallness condition fails at p = 1");
  Json explicit_constant = Json::array();
  const auto ms = cfg.m_range.empty() ? std::vector<int>{cfg.m} : cfg.m_range;
  for (int m : ms) {
    const auto N = static_cast<std::uint64_t>(std::llround(std::pow(cfg.b, m)));
    BoundValue v;
    try {
      v = explicit_error_constant(spec, N);
    } catch (const std::domain_error& e) {
      v.status = BoundStatus::Divergent;
      v.log_value = INFINITY;
    }
    if (v.status == BoundStatus::Divergent) warnings.push_back("explicit constant divergent at m = " + std::to_string(m));
    auto row = bound_value_json(v);
    row["m"] = m;
    row["N"] = N;
    explicit_constant.push_back(std::move(row));
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  const char* small_status = small.status == SmallnessResult::Status::Holds      ? "holds"
                             : small.status == SmallnessResult::Status::Violated ? "violated"
                                                                                 : "divergent";
  std::ostringstream out;
  if (format_of(cfg, "json") == "json") {
    Json j{{"config", to_json(cfg)},
           {"smallness", {{"status", small_status}, {"beta_sum", small.beta_sum}, {"threshold", small.threshold}}},
           {"cbc_bound", std::move(cbc)},
           {"truncation", std::move(truncation)},
           {"explicit_constant", std::move(explicit_constant)},
           {"warnings", warnings}};
    out << j.dump(2) << "\n";
  } else {
    auto value = [](const Json& r) { return r["value"].is_null() ? std::string("") : csv_number(r["value"]); };
    out << "table,key,value,log_value,status\n";
    for (const auto& r : cbc) {
      out << "cbc_bound," << csv_number(r["lambda"]) << "," << value(r) << "," << csv_number(r["log_value"]) << ","
          << r["status"].get<std::string>() << "\n";
    }
    for (const auto& r : truncation) {
      out << "truncation," << r["s"].get<std::size_t>() << "," << csv_number(r["bound"]) << ",,finite\n";
    }
    for (const auto& r : explicit_constant) {
      out << "explicit_constant," << r["N"].get<std::uint64_t>() << "," << value(r) << ","
          << csv_number(r["log_value"]) << "," << r["status"].get<std::string>() << "\n";
    }
  }
  emit(cfg, out.str());
  return kOk;
}

int cmd_converge(const RunConfig& cfg) {
  const auto g = integrand_of(cfg);
  auto spec = spec_of(cfg);
  ConvergenceOptions options;
  options.monte_carlo = cfg.mc_baseline;
  options.seed = cfg.seed;
  options.mc_replicates = cfg.mc_replicates;
  const auto ms = cfg.m_range.empty() ? std::vector<int>{cfg.m} : cfg.m_range;
  const auto rec = convergence_study(spec, g, ms, options);

  std::ostringstream csv;
  write_convergence_csv(csv, rec);
  emit(cfg, csv.str());
  if (!cfg.out.empty()) {
    auto meta = convergence_to_json(rec, g);
    meta["config"] = to_json(cfg);
    write_text_file(sidecar_path(cfg.out, ".meta.json"), meta.dump(2) + "\n");
  }
  auto& log = cfg.out.empty() ? std::cerr : std::cout;
  if (rec.degenerate) {
    log << "degenerate: every error is zero, no slope\n";
  } else if (rec.slope) {
    log << "slope " << csv_number(*rec.slope) << " over " << rec.points_used << " points\n";
  } else {
    log << "slope n/a (" << rec.points_used << " usable points)\n";
  }
  if (rec.mc_slope) log << "mc slope " << csv_number(*rec.mc_slope) << "\n";
  return kOk;
}

namespace {

struct CheckTally {
  CheckTally(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

  std::string name;
  double tolerance;
  std::size_t comparisons = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::vector<std::string> failed;

  void record(double err, const std::string& label) {
    ++comparisons;
    worst = std::max(worst, err);
    if (!(err <= tolerance)) {
      ++failures;
      if (failed.size() < 10) failed.push_back(label);
    }
  }
  Json json() const {
    return Json{{"name", name},     {"tolerance", tolerance}, {"comparisons", comparisons},
                {"failures", failures}, {"worst", worst},     {"failed", failed}};
  }
};

double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace

int cmd_selftest(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckTally fast_slow{"fast_vs_slow_cbc", 1e-9};
  CheckTally direct{"direct_E_equivalence", 1e-9};
  CheckTally bounds{"bound_check", 0.0};
  CheckTally fft{"fft_vs_naive", 1e-9};

  bool injected = false;
  for (int m : {3, 4, 5}) {
    for (int alpha : {2, 3}) {
      for (std::size_t s = 1; s <= 3; ++s) {
        std::vector<std::size_t> Js{0, 1, s};
        std::sort(Js.begin(), Js.end());
        Js.erase(std::unique(Js.begin(), Js.end()), Js.end());
        for (auto J : Js) {
          WeightSpec spec;
          spec.alpha = alpha;
          spec.J = J;
          spec.p = 0.55;
          spec.beta = BetaSequence::power(0.4, 2.0);
          const std::string label =
              "m=" + std::to_string(m) + " alpha=" + std::to_string(alpha) + " s=" + std::to_string(s) +
              " J=" + std::to_string(J);

          OmegaMatrix omega(find_irreducible(spec.b, m), alpha);
          if (cfg.inject_fault && !injected) {
            omega = omega.with_perturbed_entry(1, 0.25);
            injected = true;
          }
          const auto fast = fast_cbc(spec, omega, s);
          const auto slow = slow_cbc(spec, m, s);
          fast_slow.record(fast.gv.q == slow.gv.q ? 0.0 : INFINITY, label + " vector");
          for (std::size_t d = 0; d < fast.E_per_step.size(); ++d) {
            fast_slow.record(rel_diff(fast.E_per_step[d], slow.E_per_step[d]), label + " d=" + std::to_string(d + 1));
            const std::span<const GfPoly> prefix(fast.gv.q.data(), d + 1);
            direct.record(rel_diff(fast.E_per_step[d], eval_E_direct(fast.gv.modulus, prefix, spec)),
                          label + " d=" + std::to_string(d + 1));
          }
          const auto check = verify_bound(fast, spec, default_lambda_grid(alpha));
          bounds.record(check.all_hold ? 0.0 : INFINITY, label);
        }
      }
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  auto fft_case = [&](std::uint32_t b, int m) {
    const OmegaMatrix om(find_irreducible(PrimeBase(b), m), 2);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(om.size());
      for (auto& x : v) x = nd(rng);
      const auto a = om.multiply(v);
      const auto c = om.multiply_naive(v);
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        diff = std::max(diff, std::fabs(a[i] - c[i]));
        scale = std::max(scale, std::fabs(c[i]));
      }
      fft.record(scale == 0.0 ? diff : diff / scale, "b=" + std::to_string(b) + " m=" + std::to_string(m));
    }
  };
  for (int m = 1; m <= 8; ++m) fft_case(2, m);
  for (int m = 1; m <= 5; ++m) fft_case(3, m);

  Json checks = Json::array();
  bool pass = true;
  for (const auto* t : {&fast_slow, &direct, &bounds, &fft}) {
    checks.push_back(t->json());
    pass = pass && t->failures == 0;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Json report{{"pass", pass}, {"fault_injected", cfg.inject_fault}, {"seconds", secs}, {"checks", checks}};
  emit(cfg, report.dump(2) + "\n");
  for (const auto* t : {&fast_slow, &direct, &bounds, &fft}) {
    if (t->failures > 0) std::cerr << "selftest: " << t->name << " failed " << t->failures << " comparisons\n";
  }
  return pass ? kOk : kNumerical;
}

}  // namespace hoqmc::cli
