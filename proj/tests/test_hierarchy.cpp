#include <catch_amalgamated.hpp>

#include "dakns/random.hpp"
#include "dakns/resolvent.hpp"

using namespace dakns;
using Q = Rational;
using M = Matrix<Q>;
using F = MatFn<Q>;

namespace {

const Window kWin{-8, 8, 10};

AknsData<Q> data2() { return {{Q(1), Q(-1)}}; }
AknsData<Q> data3() { return {{Q(1), Q(2), Q(-1)}}; }

// Dense Gaussian elimination, used as an independent oracle for one recursion.
std::vector<Q> dense_solve(std::vector<std::vector<Q>> a, std::vector<Q> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (sgn(a[p][c]) == 0) ++p;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(a[r][c]) == 0) continue;
      Q f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

}  // namespace

TEST_CASE("vacuum dressing is trivial") {
  F U(kWin, M(2), M(2), M(2));
  auto d = solve_dressing(data2(), U, 6);
  for (int k = 1; k <= 6; ++k) {
    REQUIRE(d.w[static_cast<std::size_t>(k)].right_tail().is_zero());
    for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n)
      REQUIRE(d.w[static_cast<std::size_t>(k)].at(n).is_zero());
  }
  REQUIRE(dressing_residual(make_state(data2(), U, 6)) == 0);
}

TEST_CASE("impulse dressing matches the dense oracle") {
  F U = impulse_potential<Q>(2, kWin, 0, 0, 1);
  auto s = make_state(data2(), U, 8);
  const F& w1 = s.dressing.w[1];
  for (int n = kWin.store_lo(); n <= 0; ++n) REQUIRE(w1.at(n)(0, 1) == 0);
  for (int n = 1; n <= kWin.store_hi(); ++n) REQUIRE(w1.at(n)(0, 1) == Q(n % 2 == 1 ? 1 : -1));
  REQUIRE(s.dressing.conv.tie(0, 1));
  REQUIRE(s.dressing.conv.at(0, 1) == Direction::forward);

  // Order-2 (1,2) entry: x(n) + x(n+1) = rhs(n) with x vanishing left of storage.
  const int lo = kWin.store_lo(), hi = kWin.store_hi();
  const std::size_t size = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::vector<Q>> a(size, std::vector<Q>(size, Q(0)));
  std::vector<Q> b(size, Q(0));
  for (int n = lo - 1; n < hi; ++n) {
    const std::size_t row = static_cast<std::size_t>(n - lo + 1);
    const M r = (w1.at(n + 1) - w1.at(n)) + U.at(n) * w1.at(n);
    if (n >= lo) a[row][static_cast<std::size_t>(n - lo)] = 1;
    a[row][static_cast<std::size_t>(n + 1 - lo)] = 1;
    b[row] = r(0, 1);
  }
  std::vector<Q> x = dense_solve(a, b);
  for (int n = lo; n <= hi; ++n)
    REQUIRE(s.dressing.w[2].at(n)(0, 1) == x[static_cast<std::size_t>(n - lo)]);

  REQUIRE(dressing_residual(s) == 0);
}

TEST_CASE("first-order diagonal vanishes for zero-diagonal potentials") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    F U = random_potential<Q>(rng, 3, kWin, -3, 3);
    auto d = solve_dressing(data3(), U, 3);
    for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n)
      for (int i = 0; i < 3; ++i) REQUIRE(d.w[1].at(n)(i, i) == 0);
    REQUIRE(d.w[1].right_tail().is_zero());
  }
}

TEST_CASE("random dressings are exact") {
  Rng rng(5);
  for (auto data : {data2(), data3()}) {
    for (int trial = 0; trial < 3; ++trial) {
      F U = random_potential<Q>(rng, data.m(), kWin, -3, 3);
      auto s = make_state(data, U, 8);
      REQUIRE(dressing_residual(s) == 0);
    }
  }
}

TEST_CASE("perturbed dressing residual is localized") {
  F U = impulse_potential<Q>(2, kWin, 0, 0, 1);
  auto s = make_state(data2(), U, 8);
  s.dressing.w[1][3] += M::unit(2, 0, 1);
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
    const Q r = dressing_residual_at(s, n);
    if (n == 2 || n == 3)
      REQUIRE(r > 0);
    else
      REQUIRE(r == 0);
  }
}

TEST_CASE("invalid input is rejected") {
  F U(kWin, M(2), M(2), M(2));
  REQUIRE_THROWS_AS(solve_dressing(AknsData<Q>{{Q(1), Q(1)}}, U, 4), input_error);
  REQUIRE_THROWS_AS(solve_dressing(AknsData<Q>{{Q(0), Q(1)}}, U, 4), input_error);
  REQUIRE_THROWS_AS(solve_dressing(data2(), U, 11), input_error);
  F D = U;
  D[0](1, 1) = 1;
  REQUIRE_THROWS_AS(solve_dressing(data2(), D, 4), input_error);
  REQUIRE_NOTHROW(solve_dressing(data2(), D, 4, BoundaryPolicy::contracting, false));
}

TEST_CASE("contracting directions") {
  auto c = make_conventions(data3(), BoundaryPolicy::contracting);
  REQUIRE(c.at(0, 1) == Direction::forward);   // |1| <= |2|
  REQUIRE(c.at(1, 0) == Direction::backward);  // |2| > |1|
  REQUIRE(c.at(0, 2) == Direction::forward);   // tie
  REQUIRE(c.tie(0, 2));
  REQUIRE(c.at(1, 2) == Direction::backward);
  REQUIRE(c.at(1, 1) == Direction::diagonal);
  auto f = make_conventions(data3(), BoundaryPolicy::forward);
  REQUIRE(f.at(1, 0) == Direction::forward);
}
