#include "hoqmc/cbc.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hoqmc/summation.hpp"

namespace hoqmc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t fft_cost(std::size_t M) {
  const auto lg = static_cast<std::uint64_t>(std::max<int>(1, std::bit_width(M - 1)));
  return static_cast<std::uint64_t>(M) * lg;
}

// Smallest q among candidates whose criterion is within the tie tolerance of
// the minimum. candidates[q-1] holds E(q).
std::uint64_t select_candidate(std::span<const double> candidates, double tie_tolerance) {
  const double best = *std::min_element(candidates.begin(), candidates.end());
  const double slack = tie_tolerance * std::max(std::fabs(best), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] <= best + slack) return i + 1;
  }
  return static_cast<std::uint64_t>(std::min_element(candidates.begin(), candidates.end()) - candidates.begin()) + 1;
}

std::size_t checked_s(std::size_t s_max) {
  if (s_max == 0) throw std::invalid_argument("CBC needs s_max >= 1");
  return s_max;
}

// omega(y_j^(n)) for n = 0..N-1 of one coordinate, computed point by point.
std::vector<double> omega_column_direct(const Modulus& P, const GfPoly& q, int alpha) {
  std::vector<double> col;
  col.reserve(P.size());
  col.push_back(omega_at_position(0, alpha, P.base()));
  const auto rest = build_omega(P, q, alpha);
  col.insert(col.end(), rest.begin(), rest.end());
  return col;
}

// Literal criterion from per-coordinate omega columns (columns[j][n]).
double criterion_from_columns(const std::vector<std::vector<double>>& columns, const WeightSpec& spec) {
  const std::size_t d = columns.size();
  const auto alpha = static_cast<std::size_t>(spec.alpha);
  const std::size_t blocks = (d + alpha - 1) / alpha;

  // gamma_tilde_v depends on v only through u(v); tabulate per block mask.
  std::vector<double> by_block(std::size_t{1} << blocks);
  for (std::size_t bm = 0; bm < by_block.size(); ++bm) {
    std::vector<std::size_t> v;
    for (std::size_t j = 0; j < blocks; ++j) {
      if (bm >> j & 1u) v.push_back(j * alpha + 1);
    }
    by_block[bm] = gamma_tilde_v(v, spec);
  }
  const std::size_t subsets = std::size_t{1} << d;
  std::vector<double> weight(subsets, 0.0);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::size_t bm = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (mask >> j & 1u) bm |= std::size_t{1} << (j / alpha);
    }
    weight[mask] = by_block[bm];
  }

  const std::size_t N = columns.front().size();
  std::vector<long double> prod(subsets);
  long double total = 0.0L;
  for (std::size_t n = 0; n < N; ++n) {
    prod[0] = 1.0L;
    long double inner = 0.0L;
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
      prod[mask] = prod[mask & (mask - 1)] * columns[low][n];
      inner += weight[mask] * prod[mask];
    }
    total += inner;
  }
  return static_cast<double>(total / static_cast<long double>(N));
}

}  // namespace

// ---------------------------------------------------------------------------
// FastCbc

FastCbc::FastCbc(const WeightSpec& spec, OmegaMatrix omega, std::size_t s_max, CbcOptions options)
    : spec_(spec),
      omega_(std::move(omega)),
      s_max_(checked_s(s_max)),
      total_(static_cast<std::size_t>(spec.alpha) * s_max),
      J_(std::min(spec.J, s_max)),
      options_(options),
      N_(omega_.modulus().size()),
      M_(omega_.size()) {
  spec_.validate();
  if (omega_.alpha() != spec_.alpha) throw std::invalid_argument("Omega built for a different alpha");
  if (omega_.modulus().base() != spec_.b) throw std::invalid_argument("Omega built for a different base");

  const std::size_t slots = M_ + 1;
  state_.slot_n.resize(slots);
  state_.slot_n[0] = 0;
  for (std::size_t i = 0; i < M_; ++i) state_.slot_n[1 + i] = omega_.rader().residue(i);
  state_.Y.assign(slots, 1.0);
  state_.V.assign(slots, 1.0);
  state_.S1.assign(slots, 0.0);
  state_.S2.assign(slots, 0.0);
  state_.W.assign(slots, 0.0);
  const std::size_t max_order = static_cast<std::size_t>(spec_.alpha) * (s_max_ - J_);
  if (max_order > 0) {
    state_.U.assign(max_order + 1, std::vector<double>(slots, 0.0));
    state_.U[0].assign(slots, 1.0);
    state_.X.assign(max_order + 1, std::vector<double>());
  }
  counters_.spod_update_ops.assign(s_max_, 0);
  counters_.bookkeeping_ops.assign(s_max_, 0);
}

double FastCbc::order_factor(std::size_t s, int nu) const { return gamma_order_factor(s, nu, spec_); }

void FastCbc::begin_block(std::size_t s) {
  const std::size_t slots = M_ + 1;
  std::fill(state_.V.begin(), state_.V.end(), 1.0);
  counters_.bookkeeping_ops[s - 1] += slots;
  if (s <= J_) {
    product_factor_ = 0.0;
    for (int nu = 1; nu <= spec_.alpha; ++nu) {
      product_factor_ += factorial(static_cast<unsigned>(nu)) * order_factor(s, nu);
    }
    return;
  }
  // X(l) = sum_{nu=1}^{min(alpha,l)} gamma_s(nu) l!/(l-nu)! U(l-nu),  W = sum_l X(l)
  const auto alpha = static_cast<std::size_t>(spec_.alpha);
  const std::size_t top = alpha * (s - J_);
  std::vector<double> gamma(alpha + 1);
  for (std::size_t nu = 1; nu <= alpha; ++nu) gamma[nu] = order_factor(s, static_cast<int>(nu));
  std::fill(state_.W.begin(), state_.W.end(), 0.0);
  std::uint64_t ops = 0;
  for (std::size_t l = 1; l <= top; ++l) {
    auto& X = state_.X[l];
    X.assign(slots, 0.0);
    double falling = 1.0;  // l!/(l-nu)!
    for (std::size_t nu = 1; nu <= std::min(alpha, l); ++nu) {
      falling *= static_cast<double>(l - nu + 1);
      const double coef = gamma[nu] * falling;
      const auto& U = state_.U[l - nu];
      for (std::size_t k = 0; k < slots; ++k) X[k] += coef * U[k];
      ops += slots;
    }
    for (std::size_t k = 0; k < slots; ++k) state_.W[k] += X[k];
    ops += slots;
  }
  counters_.spod_update_ops[s - 1] += ops;
}

void FastCbc::end_block(std::size_t s) {
  const std::size_t slots = M_ + 1;
  if (s <= J_) {
    for (std::size_t k = 0; k < slots; ++k) {
      state_.Y[k] *= 1.0 + product_factor_ * (state_.V[k] - 1.0);
    }
    counters_.bookkeeping_ops[s - 1] += slots;
    if (s == J_) {
      for (std::size_t k = 0; k < slots; ++k) state_.S1[k] = state_.Y[k] - 1.0;
      counters_.bookkeeping_ops[s - 1] += slots;
    }
    return;
  }
  // U(l) += (V - 1) X(l);  S2 += (V - 1) W
  const std::size_t top = static_cast<std::size_t>(spec_.alpha) * (s - J_);
  for (std::size_t l = 1; l <= top; ++l) {
    auto& U = state_.U[l];
    const auto& X = state_.X[l];
    for (std::size_t k = 0; k < slots; ++k) U[k] += (state_.V[k] - 1.0) * X[k];
  }
  counters_.spod_update_ops[s - 1] += top * slots;
  for (std::size_t k = 0; k < slots; ++k) state_.S2[k] += (state_.V[k] - 1.0) * state_.W[k];
  counters_.bookkeeping_ops[s - 1] += slots;
}

double FastCbc::criterion_with(std::span<const double> V) const {
  const std::size_t s = state_.s;
  CompensatedSum acc;
  if (s <= J_) {
    for (std::size_t k = 0; k < V.size(); ++k) acc.add((1.0 + product_factor_ * (V[k] - 1.0)) * state_.Y[k]);
    return acc.value() / static_cast<double>(N_) - 1.0;
  }
  for (std::size_t k = 0; k < V.size(); ++k) {
    const double s1 = state_.S1[k];
    acc.add(s1 + (1.0 + s1) * (state_.S2[k] + (V[k] - 1.0) * state_.W[k]));
  }
  return acc.value() / static_cast<double>(N_);
}

CbcStep FastCbc::step() {
  if (done()) throw std::logic_error("CBC construction already complete");
  const auto start = Clock::now();
  const auto alpha = static_cast<std::size_t>(spec_.alpha);
  CbcStep out;
  out.d = selected_.size() + 1;
  out.s = (out.d - 1) / alpha + 1;
  out.t = (out.d - 1) % alpha + 1;
  state_.s = out.s;
  state_.t = out.t;
  if (out.t == 1) begin_block(out.s);

  // E(q) = base + slope * sum_{n>=1} omega_n(q) x(n)
  const bool product = out.s <= J_;
  const std::size_t slots = M_ + 1;
  std::vector<double> x(M_);
  CompensatedSum base_acc;
  double slope;
  const double w0 = omega_.omega_zero();
  if (product) {
    const double G = product_factor_;
    for (std::size_t k = 0; k < slots; ++k) {
      const double yv = state_.Y[k] * state_.V[k];
      base_acc.add(state_.Y[k] * (1.0 - G) + G * yv);
      if (k > 0) x[k - 1] = yv;
    }
    base_acc.add(G * w0 * state_.Y[0] * state_.V[0]);
    slope = G / static_cast<double>(N_);
  } else {
    for (std::size_t k = 0; k < slots; ++k) {
      const double s1 = state_.S1[k];
      const double vw = (1.0 + s1) * state_.V[k] * state_.W[k];
      base_acc.add(s1 + (1.0 + s1) * (state_.S2[k] + (state_.V[k] - 1.0) * state_.W[k]));
      if (k > 0) x[k - 1] = vw;
    }
    base_acc.add(w0 * (1.0 + state_.S1[0]) * state_.V[0] * state_.W[0]);
    slope = 1.0 / static_cast<double>(N_);
  }
  const double base = base_acc.value() / static_cast<double>(N_) - (product ? 1.0 : 0.0);

  const auto scores = omega_.multiply_permuted(x);
  ++counters_.fft_multiplies;
  out.candidate_criteria.assign(M_, 0.0);
  for (std::size_t k = 0; k < M_; ++k) {
    out.candidate_criteria[omega_.rader().residue(k) - 1] = base + slope * scores[k];
  }
  out.q = out.d == 1 ? 1 : select_candidate(out.candidate_criteria, options_.tie_tolerance);

  // V <- (1 + omega(y_{s,t})) .* V
  const std::size_t kq = omega_.rader().exponent(out.q);
  const auto col = omega_.column();
  state_.V[0] *= 1.0 + w0;
  for (std::size_t i = 0; i < M_; ++i) state_.V[1 + i] *= 1.0 + col[(i + kq) % M_];
  out.criterion = criterion_with(state_.V);

  counters_.search_ops.push_back(3 * static_cast<std::uint64_t>(slots) + fft_cost(M_) + 2 * M_);
  selected_.push_back(out.q);
  criteria_.push_back(out.criterion);
  if (out.t == alpha) end_block(out.s);
  elapsed_ms_ += elapsed_ms_since(start);
  return out;
}

CbcResult FastCbc::run() {
  while (!done()) step();
  std::vector<GfPoly> q;
  q.reserve(selected_.size());
  for (auto enc : selected_) q.push_back(GfPoly::from_index(spec_.b, enc));
  CbcResult r{GeneratingVector{omega_.modulus(), spec_.alpha, std::move(q)}, criteria_, elapsed_ms_, J_, counters_};
  return r;
}

CbcResult fast_cbc(const WeightSpec& spec, const OmegaMatrix& omega, std::size_t s_max, const CbcOptions& options) {
  const auto start = Clock::now();
  FastCbc engine(spec, omega, s_max, options);
  auto r = engine.run();
  r.elapsed_ms = elapsed_ms_since(start);
  return r;
}

CbcResult fast_cbc(const WeightSpec& spec, int m, std::size_t s_max, const CbcOptions& options) {
  spec.validate();
  const auto start = Clock::now();
  OmegaMatrix omega(find_irreducible(spec.b, m), spec.alpha);
  auto r = fast_cbc(spec, omega, s_max, options);
  r.elapsed_ms = elapsed_ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Direct criterion and slow CBC

double eval_E_direct(const Modulus& P, std::span<const GfPoly> q, const WeightSpec& spec, std::size_t max_d) {
  spec.validate();
  if (q.empty()) throw std::invalid_argument("criterion needs d >= 1");
  if (q.size() > max_d) {
    throw std::length_error("direct criterion limited to d <= " + std::to_string(max_d) + " (got " +
                            std::to_string(q.size()) + ")");
  }
  std::vector<std::vector<double>> columns;
  columns.reserve(q.size());
  for (const auto& qj : q) columns.push_back(omega_column_direct(P, qj, spec.alpha));
  return criterion_from_columns(columns, spec);
}

double eval_E_direct(const GeneratingVector& gv, const WeightSpec& spec, std::size_t d, std::size_t max_d) {
  if (d > gv.d()) throw std::invalid_argument("d exceeds the generating vector length");
  return eval_E_direct(gv.modulus, std::span<const GfPoly>(gv.q).first(d), spec, max_d);
}

CbcResult slow_cbc(const WeightSpec& spec, int m, std::size_t s_max, const CbcOptions& options) {
  spec.validate();
  checked_s(s_max);
  const std::size_t total = static_cast<std::size_t>(spec.alpha) * s_max;
  if (total > options.max_direct_dimension) {
    throw std::length_error("slow CBC limited to alpha * s_max <= " + std::to_string(options.max_direct_dimension));
  }
  const auto start = Clock::now();
  const Modulus P = find_irreducible(spec.b, m);
  const std::uint64_t M = P.size() - 1;

  // omega columns of every candidate, computed point by point
  std::vector<std::vector<double>> candidate_columns;
  candidate_columns.reserve(M);
  for (std::uint64_t q = 1; q <= M; ++q) {
    candidate_columns.push_back(omega_column_direct(P, GfPoly::from_index(spec.b, q), spec.alpha));
  }

  std::vector<std::vector<double>> chosen;
  std::vector<GfPoly> q_list;
  std::vector<double> criteria;
  for (std::size_t d = 1; d <= total; ++d) {
    std::uint64_t pick = 1;
    double value;
    if (d == 1) {
      chosen.push_back(candidate_columns[0]);
      value = criterion_from_columns(chosen, spec);
    } else {
      std::vector<double> E(M);
      chosen.emplace_back();
      for (std::uint64_t q = 1; q <= M; ++q) {
        chosen.back() = candidate_columns[q - 1];
        E[q - 1] = criterion_from_columns(chosen, spec);
      }
      pick = select_candidate(E, options.tie_tolerance);
      chosen.back() = candidate_columns[pick - 1];
      value = E[pick - 1];
    }
    q_list.push_back(GfPoly::from_index(spec.b, pick));
    criteria.push_back(value);
  }
  CbcResult r{GeneratingVector{P, spec.alpha, std::move(q_list)}, std::move(criteria), elapsed_ms_since(start),
              std::min(spec.J, s_max), {}};
  return r;
}

// ---------------------------------------------------------------------------
// bound check

std::vector<double> default_lambda_grid(int alpha, std::size_t points) {
  if (points < 2) throw std::invalid_argument("lambda grid needs at least two points");
  const double lo = 1.0 / alpha + 0.05;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = 1.0;
  return grid;
}

BoundCheck verify_bound(const CbcResult& result, const WeightSpec& spec, std::span<const double> lambda_grid) {
  BoundCheck check;
  check.criterion = result.E_per_step.back();
  const std::size_t d = result.gv.d();
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    BoundCheck::Entry e{lambda, cbc_theoretical_bound(spec, result.gv.m(), d, lambda), true};
    if (e.bound.status == BoundStatus::Finite) {
      e.holds = check.criterion <= e.bound.value * (1.0 + 1e-12);
      if (e.bound.value < best) {
        best = e.bound.value;
        check.tightest_lambda = lambda;
      }
    }
    check.all_hold = check.all_hold && e.holds;
    check.entries.push_back(e);
  }
  return check;
}

}  // namespace hoqmc
