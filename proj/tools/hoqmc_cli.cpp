#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "cli_commands.hpp"

using namespace hoqmc;
using namespace hoqmc::cli;

namespace {

// Values given on the command line; unset ones fall through to the config file.
struct Flags {
  std::optional<std::uint32_t> b;
  std::optional<int> m, alpha;
  std::optional<std::size_t> s, J, mc_replicates;
  std::optional<double> p, beta_c, beta_theta, eps, b_hol, c, c0;
  std::optional<bool> use_prime_constant;
  std::vector<double> lambda_grid;
  std::optional<std::string> family, m_range, gv, out, format, config;
  std::optional<std::uint64_t> seed;
  bool mc_baseline = false;
  bool inject_fault = false;
};

void add_weight_options(CLI::App* sub, Flags& f) {
  sub->add_option("--b", f.b, "prime base");
  sub->add_option("--m", f.m, "log_b of the number of points");
  sub->add_option("--alpha", f.alpha, "interlacing factor (>= 2)");
  sub->add_option("--s", f.s, "dimension");
  sub->add_option("--J", f.J, "crossover dimension: product weights for j <= J");
  sub->add_option("--p", f.p, "summability exponent in (0, 1]");
  sub->add_option("--beta-c", f.beta_c, "beta_j = beta_c j^-beta_theta");
  sub->add_option("--beta-theta", f.beta_theta, "decay exponent of beta");
  sub->add_option("--eps", f.eps, "target accuracy; fills J when --J is absent");
  sub->add_option("--b-hol", f.b_hol, "holomorphy constant used with --eps");
  sub->add_option("--use-prime-constant", f.use_prime_constant, "use C' = 2^alpha C (true/false)");
  sub->add_option("--lambda-grid", f.lambda_grid, "comma separated lambdas in (1/alpha, 1]")->delimiter(',');
  sub->add_option("--config", f.config, "JSON config file; flags take precedence");
  sub->add_option("--out", f.out, "output file (default stdout)");
  sub->add_option("--format", f.format, "json, csv or digits");
}

Json overlay(const Flags& f) {
  Json j = Json::object();
  auto put = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  put("b", f.b);
  put("m", f.m);
  put("alpha", f.alpha);
  put("s", f.s);
  put("J", f.J);
  put("p", f.p);
  put("beta_c", f.beta_c);
  put("beta_theta", f.beta_theta);
  put("eps", f.eps);
  put("b_hol", f.b_hol);
  put("use_prime_constant", f.use_prime_constant);
  put("family", f.family);
  put("c", f.c);
  put("c0", f.c0);
  put("m_range", f.m_range);
  put("gv", f.gv);
  put("out", f.out);
  put("format", f.format);
  put("seed", f.seed);
  put("mc_replicates", f.mc_replicates);
  if (!f.lambda_grid.empty()) j["lambda_grid"] = f.lambda_grid;
  if (f.mc_baseline) j["mc_baseline"] = true;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interlaced polynomial lattice rules by fast CBC"};
  app.require_subcommand(1);
  Flags f;

  auto* construct = app.add_subcommand("construct", "build a generating vector");
  add_weight_options(construct, f);

  auto* points = app.add_subcommand("points", "emit the interlaced point set of a generating vector");
  points->add_option("--gv", f.gv, "generating vector JSON");
  points->add_option("--config", f.config, "JSON config file");
  points->add_option("--out", f.out, "output file (default stdout)");
  points->add_option("--format", f.format, "csv, digits or json");

  auto* bounds = app.add_subcommand("bounds", "tabulate the error bounds");
  add_weight_options(bounds, f);
  bounds->add_option("--m-range", f.m_range, "m values for the explicit constant, lo:hi or a,b,c");

  auto* converge = app.add_subcommand("converge", "convergence study on a test integrand");
  add_weight_options(converge, f);
  converge->add_option("--family", f.family, "product-exponential, rational-spod or constant");
  converge->add_option("--c", f.c, "product-exponential scale");
  converge->add_option("--c0", f.c0, "rational-spod offset");
  converge->add_option("--m-range", f.m_range, "lo:hi or a,b,c");
  converge->add_option("--seed", f.seed, "Monte Carlo seed");
  converge->add_flag("--mc-baseline", f.mc_baseline, "add the Monte Carlo RMS error column");
  converge->add_option("--mc-replicates", f.mc_replicates, "Monte Carlo replicates");

  auto* selftest = app.add_subcommand("selftest", "run the oracle comparisons");
  selftest->add_option("--out", f.out, "report file (default stdout)");
  selftest->add_option("--seed", f.seed, "seed for the random FFT inputs");
  selftest->add_flag("--inject-fault", f.inject_fault, "perturb one kernel value before the comparisons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (f.config) apply_json(cfg, read_json_file(*f.config));
    apply_json(cfg, overlay(f));
    cfg.inject_fault = f.inject_fault;
    validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "hoqmc " << cfg.command << ": " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (cfg.command == "construct") return cmd_construct(cfg);
    if (cfg.command == "points") return cmd_points(cfg);
    if (cfg.command == "bounds") return cmd_bounds(cfg);
    if (cfg.command == "converge") return cmd_converge(cfg);
    return cmd_selftest(cfg);
  } catch (const FormatError& e) {
    std::cerr << "hoqmc " << cfg.command << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hoqmc " << cfg.command << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "hoqmc " << cfg.command << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "hoqmc " << cfg.command << ": " << e.what() << "\n";
    return kNumerical;
  }
}
