#pragma once

// Independent reference implementations for the tests. Nothing here calls the
// library's arithmetic: polynomials are plain coefficient vectors, the series
// digits come from solving S * P = R top down, weights are enumerated term by
// term and the criterion sums over every subset literally.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Poly = std::vector<int>;  // little endian, trimmed

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly from_index(std::uint64_t n, int b) {
  Poly a;
  for (; n > 0; n /= static_cast<std::uint64_t>(b)) a.push_back(static_cast<int>(n % static_cast<std::uint64_t>(b)));
  return a;
}

inline std::uint64_t to_index(const Poly& a, int b) {
  std::uint64_t n = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) n = n * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(*it);
  return n;
}

inline Poly mul(const Poly& a, const Poly& c, int b) {
  if (a.empty() || c.empty()) return {};
  Poly r(a.size() + c.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) r[i + j] = (r[i + j] + a[i] * c[j]) % b;
  }
  trim(r);
  return r;
}

inline int inv(int a, int b) {
  for (int x = 1; x < b; ++x) {
    if (a * x % b == 1) return x;
  }
  return 0;
}

/// First L coefficients of x^-1, x^-2, ... of R(x) / P(x), found from S P = R.
inline std::vector<int> laurent_digits(const Poly& R, const Poly& P, int L, int b) {
  const int m = static_cast<int>(P.size()) - 1;
  const int lead_inv = inv(P.back(), b);
  const int top = std::max(static_cast<int>(R.size()) - 1 - m, 0);
  // s_k for k = top .. -L, stored at offset top - k
  std::vector<int> S(static_cast<std::size_t>(top + L + 1), 0);
  auto Rc = [&](int k) { return k >= 0 && k < static_cast<int>(R.size()) ? R[static_cast<std::size_t>(k)] : 0; };
  auto Sc = [&](int k) { return k > top || k < -L ? 0 : S[static_cast<std::size_t>(top - k)]; };
  for (int k = top; k >= -L; --k) {
    // coefficient of x^{k+m} in S P: sum_i p_i s_{k+m-i} = R_{k+m}
    int acc = Rc(k + m);
    for (int i = 0; i < m; ++i) acc -= P[static_cast<std::size_t>(i)] * Sc(k + m - i);
    acc %= b;
    if (acc < 0) acc += b;
    S[static_cast<std::size_t>(top - k)] = acc * lead_inv % b;
  }
  std::vector<int> digits;
  for (int l = 1; l <= L; ++l) digits.push_back(Sc(-l));
  return digits;
}

/// Every monic polynomial of degree m not a product of two monic factors of positive degree.
inline std::vector<std::uint64_t> irreducibles(int b, int m) {
  std::uint64_t bm = 1;
  for (int i = 0; i < m; ++i) bm *= static_cast<std::uint64_t>(b);
  std::set<std::uint64_t> reducible;
  for (int d = 1; d <= m / 2; ++d) {
    std::uint64_t bd = 1;
    for (int i = 0; i < d; ++i) bd *= static_cast<std::uint64_t>(b);
    std::uint64_t be = 1;
    for (int i = 0; i < m - d; ++i) be *= static_cast<std::uint64_t>(b);
    for (std::uint64_t x = bd; x < 2 * bd; ++x) {
      for (std::uint64_t y = be; y < 2 * be; ++y) reducible.insert(to_index(mul(from_index(x, b), from_index(y, b), b), b));
    }
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = bm; n < 2 * bm; ++n) {
    if (!reducible.count(n)) out.push_back(n);
  }
  return out;
}

inline Poly mod(Poly a, const Poly& P, int b) {
  const int li = inv(P.back(), b);
  while (a.size() >= P.size()) {
    const int c = a.back() * li % b;
    const std::size_t shift = a.size() - P.size();
    for (std::size_t i = 0; i < P.size(); ++i) {
      a[shift + i] = ((a[shift + i] - c * P[i]) % b + b) % b;
    }
    trim(a);
  }
  return a;
}

/// Multiplicative order of g modulo P by repeated multiplication.
inline std::uint64_t order(const Poly& g, const Poly& P, int b) {
  Poly x = mod(g, P, b);
  std::uint64_t k = 1;
  while (!(x.size() == 1 && x[0] == 1)) {
    x = mod(mul(x, g, b), P, b);
    ++k;
    if (k > 10'000'000) return 0;
  }
  return k;
}

inline double omega_from_digits(const std::vector<int>& digits, int alpha, int b) {
  int first = 0;
  for (std::size_t l = 0; l < digits.size(); ++l) {
    if (digits[l] != 0) {
      first = static_cast<int>(l) + 1;
      break;
    }
  }
  const double bd = b;
  const double base = (bd - 1) / (std::pow(bd, alpha) - bd);
  if (first == 0) return base;
  // y in [b^-first, b^-first+1) so floor(log_b y) = -first
  return base - std::pow(bd, -first * (alpha - 1)) * (std::pow(bd, alpha) - 1) / (std::pow(bd, alpha) - bd);
}

struct Weights {
  int alpha, b;
  std::size_t J;
  std::function<double(std::size_t)> beta;
  double C;  ///< C_{alpha,b} or C'_{alpha,b}
};

inline double fact(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// gamma_u by enumerating every nu in {1..alpha}^u.
inline double gamma_u(const std::vector<std::size_t>& u, const Weights& w) {
  if (u.empty()) return 1.0;
  std::vector<int> nu(u.size(), 1);
  double total = 0;
  while (true) {
    double term = 1;
    int spod_order = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::size_t j = u[i];
      if (j <= w.J) term *= fact(nu[i]);
      else spod_order += nu[i];
      term *= (nu[i] == w.alpha ? 2.0 : 1.0) * std::pow(w.beta(j), nu[i]);
    }
    total += term * fact(spod_order);
    std::size_t k = 0;
    while (k < nu.size() && nu[k] == w.alpha) nu[k++] = 1;
    if (k == nu.size()) break;
    ++nu[k];
  }
  return total;
}

inline double gamma_tilde(const std::vector<std::size_t>& v, const Weights& w) {
  std::set<std::size_t> u;
  for (auto j : v) u.insert((j + static_cast<std::size_t>(w.alpha) - 1) / static_cast<std::size_t>(w.alpha));
  const double K = w.C * std::pow(static_cast<double>(w.b), w.alpha * (w.alpha - 1) / 2.0);
  return std::pow(K, static_cast<double>(u.size())) * gamma_u(std::vector<std::size_t>(u.begin(), u.end()), w);
}

/// E_d(q) by summing over every nonempty v subset {1..d} and every point.
inline double criterion(const Poly& P, const std::vector<std::uint64_t>& q, const Weights& w) {
  const int b = w.b;
  const int m = static_cast<int>(P.size()) - 1;
  std::uint64_t N = 1;
  for (int i = 0; i < m; ++i) N *= static_cast<std::uint64_t>(b);
  const std::size_t d = q.size();
  std::vector<double> gt(std::size_t{1} << d, 0.0);
  for (std::size_t mask = 1; mask < gt.size(); ++mask) {
    std::vector<std::size_t> v;
    for (std::size_t j = 0; j < d; ++j) {
      if (mask >> j & 1u) v.push_back(j + 1);
    }
    gt[mask] = gamma_tilde(v, w);
  }
  long double total = 0;
  for (std::uint64_t n = 0; n < N; ++n) {
    std::vector<double> om(d);
    for (std::size_t j = 0; j < d; ++j) {
      om[j] = omega_from_digits(laurent_digits(mul(from_index(n, b), from_index(q[j], b), b), P, m, b), w.alpha, b);
    }
    for (std::size_t mask = 1; mask < gt.size(); ++mask) {
      long double prod = gt[mask];
      for (std::size_t j = 0; j < d; ++j) {
        if (mask >> j & 1u) prod *= om[j];
      }
      total += prod;
    }
  }
  return static_cast<double>(total / N);
}

/// Greedy CBC over all candidates with the literal criterion; q_1 = 1, ties to the smallest q.
inline std::vector<std::uint64_t> exhaustive_cbc(const Poly& P, std::size_t d, const Weights& w,
                                                 std::vector<double>* E = nullptr) {
  const int m = static_cast<int>(P.size()) - 1;
  std::uint64_t N = 1;
  for (int i = 0; i < m; ++i) N *= static_cast<std::uint64_t>(w.b);
  std::vector<std::uint64_t> q{1};
  if (E) E->push_back(criterion(P, q, w));
  while (q.size() < d) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    q.push_back(0);
    for (std::uint64_t c = 1; c < N; ++c) {
      q.back() = c;
      vals.push_back(criterion(P, q, w));
      best = std::min(best, vals.back());
    }
    for (std::uint64_t c = 1; c < N; ++c) {
      if (vals[c - 1] <= best + 1e-10 * std::fabs(best)) {
        q.back() = c;
        break;
      }
    }
    if (E) E->push_back(vals[q.back() - 1]);
  }
  return q;
}

}  // namespace oracle
