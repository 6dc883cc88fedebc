#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "hoqmc/pointgen.hpp"
#include "oracles.hpp"

using namespace hoqmc;

namespace {

const PrimeBase two{2};

GeneratingVector random_gv(std::mt19937_64& rng, PrimeBase b, int m, int alpha, std::size_t s) {
  const Modulus P = find_irreducible(b, m);
  std::vector<GfPoly> q;
  for (std::size_t j = 0; j < static_cast<std::size_t>(alpha) * s; ++j) {
    q.push_back(GfPoly::from_index(b, 1 + rng() % (P.size() - 1)));
  }
  return GeneratingVector{P, alpha, std::move(q)};
}

}  // namespace

TEST_CASE("index_to_poly reads base-b digits") {
  CHECK(index_to_poly(0, two).is_zero());
  CHECK(index_to_poly(5, two) == GfPoly::parse(two, "101"));
  CHECK(index_to_poly(5, PrimeBase(3)) == GfPoly::parse(PrimeBase(3), "12"));
  CHECK_THROWS_AS(index_to_poly(-1, two), std::invalid_argument);
}

TEST_CASE("classical point examples") {
  const GeneratingVector gv{Modulus(GfPoly::parse(two, "111")), 1, {GfPoly::one(two)}};
  CHECK(classical_point(gv, 1).coords[0].value() == 0.25);
  const GeneratingVector gv1{Modulus(GfPoly::parse(two, "10")), 1, {GfPoly::one(two)}};
  CHECK(classical_point(gv1, 1).coords[0].value() == 0.5);
  for (const auto& c : classical_point(gv, 0).coords) CHECK(c.is_zero());
}

TEST_CASE("generating vector validation") {
  const Modulus P = find_irreducible(two, 3);
  CHECK_THROWS_AS((GeneratingVector{P, 2, {GfPoly::one(two)}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GeneratingVector{P, 1, {GfPoly::from_index(two, 8)}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GeneratingVector{P, 1, {GfPoly(two)}}.validate()), std::invalid_argument);
  CHECK_NOTHROW((GeneratingVector{P, 1, {GfPoly::from_index(two, 7)}}.validate()));
}

TEST_CASE("interlacing examples") {
  const std::vector<DigitVector> x{DigitVector(two, {1, 0}), DigitVector(two, {0, 1})};
  const auto y = interlace_scalar(x, 2);
  CHECK(std::vector<std::uint8_t>(y.digits().begin(), y.digits().end()) == std::vector<std::uint8_t>{1, 0, 0, 1});
  CHECK(y.value() == 0.5625);
  CHECK(interlace_scalar(std::vector<DigitVector>{DigitVector(two, {0, 0}), DigitVector(two, {0, 0})}, 2).is_zero());
  const std::vector<DigitVector> one{DigitVector(two, {1, 0, 1})};
  CHECK(interlace_scalar(one, 1) == one[0]);
}

TEST_CASE("interlacing with alpha 1 is the identity on point sets") {
  std::mt19937_64 rng(3);
  const auto gv = random_gv(rng, two, 4, 1, 3);
  const auto ps = classical_points(gv);
  const auto il = interlace_points(ps, 1);
  REQUIRE(il.points.size() == ps.points.size());
  for (std::size_t n = 0; n < ps.points.size(); ++n) CHECK(il.points[n].coords == ps.points[n].coords);
}

TEST_CASE("interlaced digit j + (a-1) alpha is digit a of input j") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int alpha = 1 + static_cast<int>(rng() % 4);
    const PrimeBase b(trial % 3 == 0 ? 3 : 2);
    const std::size_t L = 1 + rng() % 6;
    std::vector<DigitVector> x;
    for (int j = 0; j < alpha; ++j) {
      std::vector<std::uint8_t> d(L);
      for (auto& v : d) v = static_cast<std::uint8_t>(rng() % b.value());
      x.emplace_back(b, d);
    }
    const auto y = interlace_scalar(x, alpha);
    REQUIRE(y.precision() == L * static_cast<std::size_t>(alpha));
    for (int j = 1; j <= alpha; ++j) {
      for (std::size_t a = 1; a <= L; ++a) {
        CHECK(y.digit(static_cast<std::size_t>(j) + (a - 1) * static_cast<std::size_t>(alpha)) == x[j - 1].digit(a));
      }
    }
  }
}

TEST_CASE("classical points match the series oracle") {
  std::mt19937_64 rng(9);
  for (int b : {2, 3}) {
    const auto gv = random_gv(rng, PrimeBase(b), b == 2 ? 5 : 3, 2, 2);
    const oracle::Poly Po(gv.modulus.poly().coeffs().begin(), gv.modulus.poly().coeffs().end());
    const int m = gv.m();
    for (std::uint64_t n = 0; n < gv.num_points(); ++n) {
      const auto p = classical_point(gv, n);
      for (std::size_t j = 0; j < gv.d(); ++j) {
        const auto want = oracle::laurent_digits(
            oracle::mul(oracle::from_index(n, b), oracle::from_index(gv.q[j].to_index(), b), b), Po, m, b);
        for (int l = 1; l <= m; ++l) CHECK(p.coords[j].digit(static_cast<std::size_t>(l)) == want[l - 1]);
      }
    }
  }
}

TEST_CASE("one-dimensional projections are permutations of the grid") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const PrimeBase b(trial % 2 == 0 ? 2 : 3);
    const int m = 1 + static_cast<int>(rng() % (b.value() == 2 ? 8 : 5));
    const auto gv = random_gv(rng, b, m, 1, 3);
    const auto ps = classical_points(gv);
    const std::uint64_t N = gv.num_points();
    REQUIRE(ps.points.size() == N);
    for (std::size_t j = 0; j < gv.d(); ++j) {
      std::vector<std::uint64_t> k;
      for (const auto& p : ps.points) k.push_back(static_cast<std::uint64_t>(std::llround(p.coords[j].value() * N)));
      std::sort(k.begin(), k.end());
      for (std::uint64_t i = 0; i < N; ++i) CHECK(k[i] == i);
    }
  }
}

TEST_CASE("streamed interlaced points equal the materialized set") {
  std::mt19937_64 rng(17);
  const auto gv = random_gv(rng, two, 4, 3, 2);
  const auto ps = interlace_points(classical_points(gv), 3);
  CHECK(ps.dimension == 2);
  std::size_t seen = 0;
  for_each_interlaced_point(gv, [&](std::uint64_t n, const DigitPoint& p) {
    CHECK(p.coords == ps.points[n].coords);
    ++seen;
  });
  CHECK(seen == 16);
  CHECK(to_unit_float(DigitPoint{{DigitVector(two, {1}), DigitVector(two, {0, 1})}}) == std::vector<double>{0.5, 0.25});
}
