#pragma once

// Component-by-component construction of interlaced polynomial lattice rules
// for hybrid product/SPOD weights.
//
// Components are indexed d = alpha (s - 1) + t: block s, position t. For
// blocks s <= J the weights are of product form and the search keeps the
// running products Y and V; for s > J the SPOD part is tracked through the
// order-resolved sums U(l), X(l), W on top of the frozen product part S1.
//
// Per-n vectors are stored by slot: slot 0 is the point n = 0, slot 1 + i is
// the point n = g^i in Rader order (g the primitive element of Z_b[x]/(P)).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hoqmc/kernel.hpp"
#include "hoqmc/pointgen.hpp"
#include "hoqmc/weights.hpp"

namespace hoqmc {

struct CbcOptions {
  /// Candidates within this relative distance of the minimal criterion are
  /// tied; the smallest q encoding wins.
  double tie_tolerance = 1e-10;
  /// Size guard for the literal subset-sum criterion.
  std::size_t max_direct_dimension = 16;
};

/// Work counters in units of per-point vector operations.
struct CbcCounters {
  std::vector<std::uint64_t> search_ops;      ///< per component: build, FFT multiply, select, update V
  std::vector<std::uint64_t> spod_update_ops;  ///< per block: X(l), W and U(l) updates (0 for product blocks)
  std::vector<std::uint64_t> bookkeeping_ops;  ///< per block: V reset, Y / S2 updates
  std::uint64_t fft_multiplies = 0;
};

struct CbcState {
  std::size_t s = 0;  ///< block of the last selected component (0 before the first)
  std::size_t t = 0;  ///< position within that block
  std::vector<double> Y;   ///< product-regime running product
  std::vector<double> V;   ///< current-block partial product
  std::vector<double> S1;  ///< frozen product part Y_J - 1
  std::vector<double> S2;  ///< SPOD part of the completed blocks
  std::vector<double> W;
  std::vector<std::vector<double>> U;  ///< U[l], l = 0..alpha (s_max - J)
  std::vector<std::vector<double>> X;  ///< X[l], l = 1..alpha (s - J); X[0] unused
  std::vector<std::uint64_t> slot_n;   ///< point index n held by each slot
};

struct CbcStep {
  std::size_t d = 0, s = 0, t = 0;
  std::uint64_t q = 0;     ///< encoding of the selected polynomial
  double criterion = 0.0;  ///< E_d after selecting q
  std::vector<double> candidate_criteria;  ///< E_d(q) for q = 1..b^m-1 (index q-1)
};

struct CbcResult {
  GeneratingVector gv;
  std::vector<double> E_per_step;
  double elapsed_ms = 0.0;
  std::size_t J = 0;
  CbcCounters counters;
};

/// Stepwise fast CBC; each step() selects one component.
class FastCbc {
 public:
  FastCbc(const WeightSpec& spec, OmegaMatrix omega, std::size_t s_max, CbcOptions options = {});

  bool done() const noexcept { return selected_.size() == total_; }
  CbcStep step();
  const CbcState& state() const noexcept { return state_; }
  std::span<const std::uint64_t> selected() const noexcept { return selected_; }
  const CbcCounters& counters() const noexcept { return counters_; }
  std::size_t regime_boundary() const noexcept { return J_; }
  /// gamma_s(nu) as used by the recursion (weights with the constant absorbed).
  double order_factor(std::size_t s, int nu) const;

  /// Runs the remaining steps and packages the result.
  CbcResult run();

 private:
  void begin_block(std::size_t s);
  void end_block(std::size_t s);
  double criterion_with(std::span<const double> V) const;

  WeightSpec spec_;
  OmegaMatrix omega_;
  std::size_t s_max_, total_, J_;
  CbcOptions options_;
  std::uint64_t N_;
  std::size_t M_;
  CbcState state_;
  double product_factor_ = 0.0;  ///< sum_nu nu! gamma_s(nu) of the current product block
  std::vector<std::uint64_t> selected_;
  std::vector<double> criteria_;
  CbcCounters counters_;
  double elapsed_ms_ = 0.0;
};

CbcResult fast_cbc(const WeightSpec& spec, int m, std::size_t s_max, const CbcOptions& options = {});
CbcResult fast_cbc(const WeightSpec& spec, const OmegaMatrix& omega, std::size_t s_max,
                   const CbcOptions& options = {});

/// Greedy CBC with the literal subset-sum criterion at every candidate; same
/// first component and tie-breaking as fast_cbc.
CbcResult slow_cbc(const WeightSpec& spec, int m, std::size_t s_max, const CbcOptions& options = {});

/// E_d(q) = (1/b^m) sum_n sum_{empty != v subset {1..d}} gamma_tilde_v prod_{j in v} omega(y_j^(n)).
double eval_E_direct(const GeneratingVector& gv, const WeightSpec& spec, std::size_t d,
                     std::size_t max_d = 20);
/// Same criterion for a partial vector q_1..q_d (d need not be a multiple of alpha).
double eval_E_direct(const Modulus& P, std::span<const GfPoly> q, const WeightSpec& spec,
                     std::size_t max_d = 20);

std::vector<double> default_lambda_grid(int alpha, std::size_t points = 10);

struct BoundCheck {
  struct Entry {
    double lambda;
    BoundValue bound;
    bool holds;
  };
  double criterion = 0.0;
  std::vector<Entry> entries;
  bool all_hold = true;
  std::optional<double> tightest_lambda;  ///< lambda with the smallest finite bound
};

/// Checks E_d(q*) <= CBC bound at every lambda of the grid.
BoundCheck verify_bound(const CbcResult& result, const WeightSpec& spec, std::span<const double> lambda_grid);

}  // namespace hoqmc
