#include <catch_amalgamated.hpp>

#include "dakns/random.hpp"

using namespace dakns;
using Q = Rational;
using M = Matrix<Q>;
using F = MatFn<Q>;

namespace {

const Window kWin{-6, 6, 3};

F scalar_fn(auto fn, const Q& step = Q(1)) {
  F f(kWin, M(1), M(1), M(1), step);
  for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n) f[n](0, 0) = fn(n);
  return f;
}

}  // namespace

TEST_CASE("shift operator") {
  F c = F::constant(kWin, M::identity(2));
  REQUIRE(shift_apply(c, 1) == c);

  M E = M::unit(2, 0, 1);
  F d(kWin, M(2), M(2), M(2));
  d[0] = E;
  F s = shift_apply(d, 1);
  REQUIRE(s.at(-1) == E);
  REQUIRE(s.at(0).is_zero());
  REQUIRE(s.claim_hi() == kWin.store_hi() - 1);

  Rng rng(1);
  F r = random_compact<Q>(rng, 2, kWin, -4, 4);
  F back = shift_apply(shift_apply(r, 1), -1);
  for (int n = back.claim_lo(); n <= back.claim_hi(); ++n) REQUIRE(back.at(n) == r.at(n));
}

TEST_CASE("difference operators") {
  F c = F::constant(kWin, M::identity(2));
  F dc = delta_apply(c, DeltaKind::forward);
  for (int n = dc.claim_lo(); n <= dc.claim_hi(); ++n) REQUIRE(dc.at(n).is_zero());

  F sq = scalar_fn([](int n) { return Q(n * n); });
  F dsq = delta_apply(sq, DeltaKind::forward);
  for (int n = dsq.claim_lo(); n <= dsq.claim_hi(); ++n) REQUIRE(dsq.at(n)(0, 0) == Q(2 * n + 1));

  for (int k = 1; k <= 4; ++k) {
    const Q eps = scalar_traits<Q>::ratio(1, 1 << k);
    F x = scalar_fn([&](int n) { return Q(scalar_traits<Q>::ratio(3, 2) + n * eps); }, eps);
    F dx = delta_apply(x, DeltaKind::forward);
    for (int n = dx.claim_lo(); n <= dx.claim_hi(); ++n) REQUIRE(dx.at(n)(0, 0) == 1);
  }

  Rng rng(2);
  F r = random_compact<Q>(rng, 2, kWin, -5, 5);
  REQUIRE(delta_apply(r, DeltaKind::forward, true) == delta_apply(r, DeltaKind::forward, false));
}

TEST_CASE("Leibniz law") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    F f = random_compact<Q>(rng, 3, kWin, -5, 5);
    F g = random_compact<Q>(rng, 3, kWin, -5, 5);
    F lhs = delta_apply(f * g, DeltaKind::forward);
    F r1 = shift_apply(f, 1) * delta_apply(g, DeltaKind::forward) + delta_apply(f, DeltaKind::forward) * g;
    F r2 = delta_apply(f, DeltaKind::forward) * shift_apply(g, 1) + f * delta_apply(g, DeltaKind::forward);
    for (int n = lhs.claim_lo(); n <= lhs.claim_hi(); ++n) {
      REQUIRE(lhs.at(n) == r1.at(n));
      REQUIRE(lhs.at(n) == r2.at(n));
    }
  }
}

TEST_CASE("inner product and dual difference") {
  F f(kWin, M(2), M(2), M(2));
  f[0] = M::unit(2, 0, 0);
  REQUIRE(inner_product(f, f) == 1);

  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    F a = random_compact<Q>(rng, 2, kWin, -4, 4);
    F b = random_compact<Q>(rng, 2, kWin, -4, 4);
    REQUIRE(inner_product(delta_apply(a, DeltaKind::forward), b) ==
            inner_product(a, delta_apply(b, DeltaKind::dual)));
    F sa = scalar_fn([&](int n) { return std::abs(n) < 4 ? Q(rng.rational<Q>(3, 4)) : Q(0); });
    F sb = scalar_fn([&](int n) { return std::abs(n) < 4 ? Q(rng.rational<Q>(3, 4)) : Q(0); });
    REQUIRE(inner_product(sa, sb) == inner_product(sb, sa));
  }

  F one = F::constant(kWin, M::identity(2));
  REQUIRE_THROWS_AS(inner_product(one, one), input_error);
}

TEST_CASE("mismatched operands are rejected") {
  F a = F::constant(kWin, M::identity(2));
  F b = F::constant(kWin, M::identity(2), scalar_traits<Q>::ratio(1, 2));
  REQUIRE_THROWS_AS(a + b, dimension_error);
  F c = F::constant(Window{-5, 6, 3}, M::identity(2));
  REQUIRE_THROWS_AS(a * c, dimension_error);
}
