#include "hoqmc/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hoqmc {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field \"") + key + "\" has the wrong type");
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw FormatError(std::string("unknown key \"") + key + "\" in " + what);
  }
}

std::string digit_string(const DigitVector& x) {
  std::string s;
  s.reserve(x.precision());
  for (auto d : x.digits()) s.push_back(static_cast<char>(d < 10 ? '0' + d : 'a' + d - 10));
  return s;
}

void write_row_header(std::ostream& out, std::size_t s) {
  for (std::size_t j = 1; j <= s; ++j) out << (j > 1 ? "," : "") << 'y' << j;
  out << '\n';
}

}  // namespace

Json gv_to_json(const GeneratingVector& gv) {
  Json q = Json::array();
  for (const auto& p : gv.q) q.push_back(p.to_digit_string());
  return Json{{"b", gv.base().value()},
              {"m", gv.m()},
              {"alpha", gv.alpha},
              {"s", gv.s()},
              {"P", gv.modulus.poly().to_digit_string()},
              {"q", std::move(q)}};
}

GeneratingVector gv_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("generating vector: expected a JSON object");
  try {
    const PrimeBase b(field<std::uint32_t>(j, "b"));
    const int m = field<int>(j, "m");
    const int alpha = field<int>(j, "alpha");
    const auto s = field<std::size_t>(j, "s");
    Modulus P(GfPoly::parse(b, field<std::string>(j, "P")));
    if (P.degree() != m) throw FormatError("generating vector: deg P differs from m");
    std::vector<GfPoly> q;
    for (const auto& e : field<std::vector<std::string>>(j, "q")) q.push_back(GfPoly::parse(b, e));
    GeneratingVector gv{std::move(P), alpha, std::move(q)};
    if (alpha < 1 || gv.d() != static_cast<std::size_t>(alpha) * s) {
      throw FormatError("generating vector: q must hold alpha * s polynomials");
    }
    gv.validate();
    return gv;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("generating vector: ") + e.what());
  }
}

Json beta_to_json(const BetaSequence& beta) {
  if (beta.kind() == BetaSequence::Kind::Power) {
    return Json{{"kind", "power"}, {"c", beta.c()}, {"theta", beta.theta()}};
  }
  Json j{{"kind", "list"}, {"values", beta.values()}};
  if (beta.has_tail()) {
    j["c"] = beta.c();
    j["theta"] = beta.theta();
  }
  return j;
}

BetaSequence beta_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("beta: expected a JSON object");
  reject_unknown(j, {"kind", "c", "theta", "values"}, "beta");
  const auto kind = field<std::string>(j, "kind");
  try {
    if (kind == "power") return BetaSequence::power(field<double>(j, "c"), field<double>(j, "theta"));
    if (kind == "list") {
      auto values = field<std::vector<double>>(j, "values");
      if (j.contains("c") || j.contains("theta")) {
        return BetaSequence::list_with_tail(std::move(values), field<double>(j, "c"), field<double>(j, "theta"));
      }
      return BetaSequence::list(std::move(values));
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("beta: ") + e.what());
  }
  throw FormatError("beta: kind must be \"power\" or \"list\"");
}

Json spec_to_json(const WeightSpec& spec) {
  return Json{{"alpha", spec.alpha},
              {"b", spec.b.value()},
              {"J", spec.J},
              {"p", spec.p},
              {"beta", beta_to_json(spec.beta)},
              {"use_prime_constant", spec.use_prime_constant}};
}

WeightSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("weight spec: expected a JSON object");
  reject_unknown(j, {"alpha", "b", "J", "p", "beta", "use_prime_constant"}, "weight spec");
  try {
    WeightSpec spec;
    spec.alpha = field<int>(j, "alpha");
    spec.b = PrimeBase(field<std::uint32_t>(j, "b"));
    spec.J = field<std::size_t>(j, "J");
    spec.p = field<double>(j, "p");
    spec.beta = beta_from_json(j.at("beta"));
    if (j.contains("use_prime_constant")) spec.use_prime_constant = field<bool>(j, "use_prime_constant");
    spec.validate();
    return spec;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("weight spec: ") + e.what());
  }
}

Json bound_check_to_json(const BoundCheck& check) {
  Json entries = Json::array();
  for (const auto& e : check.entries) {
    Json row{{"lambda", e.lambda}, {"status", to_string(e.bound.status)}, {"log_bound", e.bound.log_value},
             {"exact", e.bound.exact}, {"holds", e.holds}};
    row["bound"] = e.bound.status == BoundStatus::Finite ? Json(e.bound.value) : Json(nullptr);
    entries.push_back(std::move(row));
  }
  Json j{{"criterion", check.criterion}, {"all_hold", check.all_hold}, {"entries", std::move(entries)}};
  j["tightest_lambda"] = check.tightest_lambda ? Json(*check.tightest_lambda) : Json(nullptr);
  return j;
}

Json cbc_sidecar(const CbcResult& result, const BoundCheck& check, const Json& config) {
  return Json{{"E_per_step", result.E_per_step},
              {"J", result.J},
              {"elapsed_ms", result.elapsed_ms},
              {"bound_check", bound_check_to_json(check)},
              {"config", config}};
}

void write_points_csv(std::ostream& out, const PointSet& ps) {
  write_row_header(out, ps.dimension);
  char buf[32];
  for (const auto& p : ps.points) {
    for (std::size_t j = 0; j < p.coords.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p.coords[j].value());
      out << (j > 0 ? "," : "") << buf;
    }
    out << '\n';
  }
}

void write_points_digits(std::ostream& out, const PointSet& ps) {
  write_row_header(out, ps.dimension);
  for (const auto& p : ps.points) {
    for (std::size_t j = 0; j < p.coords.size(); ++j) out << (j > 0 ? "," : "") << digit_string(p.coords[j]);
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const ConvergenceRecord& rec) {
  const bool mc = rec.options.monte_carlo;
  out << "m,N,error" << (mc ? ",mc_error" : "") << '\n';
  char buf[32];
  for (const auto& e : rec.entries) {
    out << e.m << ',' << e.N << ',';
    std::snprintf(buf, sizeof buf, "%.17g", e.error);
    out << buf;
    if (mc) {
      std::snprintf(buf, sizeof buf, "%.17g", e.mc_error.value_or(0.0));
      out << ',' << buf;
    }
    out << '\n';
  }
}

Json integrand_to_json(const Integrand& g) {
  Json j{{"family", to_string(g.family)}, {"dimension", g.dimension}, {"rates", g.rates}};
  if (!g.pinned_rates.empty()) {
    j["pinned_rates"] = g.pinned_rates;
    j["anchor"] = g.anchor;
  }
  if (g.family == IntegrandFamily::RationalSpod) j["c0"] = g.offset;
  j["reference"] = g.reference ? Json(*g.reference) : Json(nullptr);
  j["provenance"] = to_string(g.provenance);
  return j;
}

Json convergence_to_json(const ConvergenceRecord& rec, const Integrand& g) {
  Json entries = Json::array();
  for (const auto& e : rec.entries) {
    Json row{{"m", e.m}, {"N", e.N}, {"estimate", e.estimate}, {"error", e.error}, {"cbc_ms", e.cbc_ms}};
    if (e.mc_error) row["mc_error"] = *e.mc_error;
    entries.push_back(std::move(row));
  }
  Json j{{"spec", spec_to_json(rec.spec)},
         {"s", rec.s},
         {"integrand", integrand_to_json(g)},
         {"entries", std::move(entries)}};
  j["slope"] = rec.slope ? Json(*rec.slope) : Json(nullptr);
  if (rec.options.monte_carlo) {
    j["mc_slope"] = rec.mc_slope ? Json(*rec.mc_slope) : Json(nullptr);
    j["mc_seed"] = rec.options.seed;
    j["mc_replicates"] = rec.options.mc_replicates;
  }
  j["fit"] = Json{{"excluded_smallest", rec.options.exclude_smallest},
                  {"clamp", rec.options.clamp},
                  {"points_used", rec.points_used}};
  j["degenerate"] = rec.degenerate;
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& path, const std::string& suffix) {
  auto out = path;
  out.replace_filename(path.stem().string() + suffix);
  return out;
}

}  // namespace hoqmc
