#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoqmc/io.hpp"

namespace hoqmc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Invalid configuration; the message names the offending field.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::uint32_t b = 2;
  int m = 10;
  int alpha = 2;
  std::size_t s = 0;
  std::optional<std::size_t> J;
  double p = 1.0;
  double beta_c = 0.1;
  double beta_theta = 2.0;
  std::optional<double> eps;
  double b_hol = 1.0;
  bool use_prime_constant = true;
  std::vector<double> lambda_grid;  ///< empty: default grid for alpha
  std::string family = "product-exponential";
  double c = 1.0;   ///< product-exponential scale
  double c0 = 3.0;  ///< rational-spod offset
  std::vector<int> m_range;
  std::string gv;   ///< input generating vector (points)
  std::string out;  ///< empty: stdout
  std::string format;
  std::uint64_t seed = 20240101;
  bool mc_baseline = false;
  std::size_t mc_replicates = 32;
  bool inject_fault = false;
};

/// Overlays `j` onto `cfg`; unknown keys and mistyped values are UsageErrors.
void apply_json(RunConfig& cfg, const Json& j);
/// Range checks for the fields `cfg.command` uses.
void validate(const RunConfig& cfg);
Json to_json(const RunConfig& cfg);

/// "6:13" (inclusive) or "6,8,10".
std::vector<int> parse_m_range(const std::string& text);

int cmd_construct(RunConfig cfg);
int cmd_points(const RunConfig& cfg);
int cmd_bounds(RunConfig cfg);
int cmd_converge(const RunConfig& cfg);
int cmd_selftest(const RunConfig& cfg);

}  // namespace hoqmc::cli
