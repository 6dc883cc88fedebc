#pragma once

// JSON and CSV forms of generating vectors, weight specifications, CBC
// sidecars, point sets and convergence records.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hoqmc/cbc.hpp"
#include "hoqmc/pointgen.hpp"
#include "hoqmc/quad.hpp"
#include "hoqmc/weights.hpp"

namespace hoqmc {

using Json = nlohmann::ordered_json;

/// Malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"b", "m", "alpha", "s", "P", "q"} with polynomials as digit strings.
Json gv_to_json(const GeneratingVector& gv);
GeneratingVector gv_from_json(const Json& j);

Json beta_to_json(const BetaSequence& beta);
BetaSequence beta_from_json(const Json& j);

Json spec_to_json(const WeightSpec& spec);
WeightSpec spec_from_json(const Json& j);

Json bound_check_to_json(const BoundCheck& check);

/// {"E_per_step", "J", "elapsed_ms", "bound_check", "config"}.
Json cbc_sidecar(const CbcResult& result, const BoundCheck& check, const Json& config);

/// Header y1..ys, one row per point, coordinates in [0,1).
void write_points_csv(std::ostream& out, const PointSet& ps);
/// Same layout with every coordinate as its base-b digit string (first digit first).
void write_points_digits(std::ostream& out, const PointSet& ps);

/// Columns m, N, error (and mc_error when the baseline ran).
void write_convergence_csv(std::ostream& out, const ConvergenceRecord& rec);
Json convergence_to_json(const ConvergenceRecord& rec, const Integrand& g);
Json integrand_to_json(const Integrand& g);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// `dir/stem.cbc.json` next to `path`.
std::filesystem::path sidecar_path(const std::filesystem::path& path, const std::string& suffix);

}  // namespace hoqmc
