#include "hoqmc/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace hoqmc {

namespace {

// FFTW's planner is not reentrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

template <typename T>
struct FftwFree {
  void operator()(T* p) const noexcept { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double, FftwFree<double>>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwFree<fftw_complex>>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

}  // namespace

int mu_alpha(std::uint64_t k, int alpha, PrimeBase b) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  std::vector<int> positions;  // ascending
  for (int pos = 1; k > 0; ++pos, k /= b.value()) {
    if (k % b.value() != 0) positions.push_back(pos);
  }
  int sum = 0;
  for (int i = 0; i < alpha && i < static_cast<int>(positions.size()); ++i) {
    sum += positions[positions.size() - 1 - static_cast<std::size_t>(i)];
  }
  return sum;
}

double omega_at_position(std::size_t leading_position, int alpha, PrimeBase b) {
  if (alpha < 2) throw std::invalid_argument("omega needs alpha >= 2");
  const double bd = b.value();
  const double ba = std::pow(bd, alpha);
  const double base = (bd - 1.0) / (ba - bd);
  if (leading_position == 0) return base;
  const double scale = std::pow(bd, -static_cast<double>(leading_position) * (alpha - 1));
  return base - scale * (ba - 1.0) / (ba - bd);
}

double omega(const DigitVector& y, int alpha) {
  return omega_at_position(y.leading_position(), alpha, y.base());
}

RaderPermutation::RaderPermutation(const Modulus& P) : generator_(primitive_element(P)) {
  const std::uint64_t M = P.size() - 1;
  power_.resize(M);
  log_.assign(M + 1, 0);
  GfPoly cur = GfPoly::one(P.base());
  for (std::size_t i = 0; i < M; ++i) {
    const std::uint64_t enc = cur.to_index();
    power_[i] = enc;
    log_[enc] = i;
    cur = poly_mul_mod(cur, generator_, P);
  }
}

std::vector<double> build_omega(const Modulus& P, const GfPoly& q_col, int alpha) {
  const std::uint64_t N = P.size();
  const auto m = static_cast<std::size_t>(P.degree());
  std::vector<double> col;
  col.reserve(N - 1);
  for (std::uint64_t n = 1; n < N; ++n) {
    col.push_back(omega(laurent_digits(GfPoly::from_index(P.base(), n), q_col, P, m), alpha));
  }
  return col;
}

struct OmegaMatrix::FftPlan {
  std::size_t length = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> column_spectrum;

  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

OmegaMatrix::OmegaMatrix(const Modulus& P, int alpha)
    : modulus_(P),
      alpha_(alpha),
      omega_zero_(omega_at_position(0, alpha, P.base())),
      rader_(std::make_shared<const RaderPermutation>(P)) {
  const auto m = static_cast<std::size_t>(P.degree());
  const GfPoly one = GfPoly::one(P.base());
  column_.resize(rader_->size());
  for (std::size_t j = 0; j < column_.size(); ++j) {
    const GfPoly r = GfPoly::from_index(P.base(), rader_->residue(j));
    column_[j] = omega(laurent_digits(r, one, P, m), alpha);
  }
  prepare_fft();
}

void OmegaMatrix::prepare_fft() {
  auto plan = std::make_shared<FftPlan>();
  const std::size_t M = column_.size();
  const std::size_t H = M / 2 + 1;
  plan->length = M;
  auto in = alloc_real(M);
  auto out = alloc_complex(H);
  {
    std::lock_guard lock(planner_mutex());
    plan->forward = fftw_plan_dft_r2c_1d(static_cast<int>(M), in.get(), out.get(), FFTW_ESTIMATE);
    plan->backward = fftw_plan_dft_c2r_1d(static_cast<int>(M), out.get(), in.get(), FFTW_ESTIMATE);
  }
  if (!plan->forward || !plan->backward) throw std::runtime_error("FFTW planning failed");
  std::copy(column_.begin(), column_.end(), in.get());
  fftw_execute_dft_r2c(plan->forward, in.get(), out.get());
  plan->column_spectrum.resize(H);
  for (std::size_t f = 0; f < H; ++f) plan->column_spectrum[f] = {out.get()[f][0], out.get()[f][1]};
  fft_ = std::move(plan);
}

double OmegaMatrix::entry(std::uint64_t n, std::uint64_t q) const {
  const std::size_t M = size();
  return column_[(rader_->exponent(n) + rader_->exponent(q)) % M];
}

std::vector<double> OmegaMatrix::multiply_permuted(std::span<const double> x) const {
  const std::size_t M = size();
  if (x.size() != M) throw std::invalid_argument("Omega multiply: vector length must be b^m - 1");
  const std::size_t H = M / 2 + 1;
  auto in = alloc_real(M);
  auto spec = alloc_complex(H);
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute_dft_r2c(fft_->forward, in.get(), spec.get());
  // Cross-correlation: out[k] = sum_i c[i + k] x[i]  <=>  OUT = C * conj(X).
  for (std::size_t f = 0; f < H; ++f) {
    const std::complex<double> X(spec.get()[f][0], spec.get()[f][1]);
    const std::complex<double> r = fft_->column_spectrum[f] * std::conj(X);
    spec.get()[f][0] = r.real();
    spec.get()[f][1] = r.imag();
  }
  fftw_execute_dft_c2r(fft_->backward, spec.get(), in.get());
  std::vector<double> out(M);
  const double inv = 1.0 / static_cast<double>(M);
  for (std::size_t k = 0; k < M; ++k) out[k] = in.get()[k] * inv;
  return out;
}

std::vector<double> OmegaMatrix::multiply(std::span<const double> vec) const {
  const std::size_t M = size();
  if (vec.size() != M) throw std::invalid_argument("Omega multiply: vector length must be b^m - 1");
  std::vector<double> x(M);
  for (std::size_t i = 0; i < M; ++i) x[i] = vec[rader_->residue(i) - 1];
  const auto scores = multiply_permuted(x);
  std::vector<double> out(M);
  for (std::size_t k = 0; k < M; ++k) out[rader_->residue(k) - 1] = scores[k];
  return out;
}

std::vector<double> OmegaMatrix::multiply_naive(std::span<const double> vec) const {
  const std::size_t M = size();
  if (vec.size() != M) throw std::invalid_argument("Omega multiply: vector length must be b^m - 1");
  std::vector<double> out(M, 0.0);
  for (std::uint64_t q = 1; q <= M; ++q) {
    long double acc = 0.0L;
    for (std::uint64_t n = 1; n <= M; ++n) acc += static_cast<long double>(entry(n, q)) * vec[n - 1];
    out[q - 1] = static_cast<double>(acc);
  }
  return out;
}

OmegaMatrix OmegaMatrix::with_perturbed_entry(std::size_t j, double delta) const {
  OmegaMatrix copy = *this;
  copy.column_.at(j) += delta;
  copy.prepare_fft();
  return copy;
}

}  // namespace hoqmc
