#include <catch_amalgamated.hpp>

#include "dakns/random.hpp"
#include "dakns/resolvent.hpp"

using namespace dakns;
using Q = Rational;
using M = Matrix<Q>;
using F = MatFn<Q>;
using S = Series<Q>;

namespace {

const Window kWin{-8, 8, 10};

AknsData<Q> data2() { return {{Q(1), Q(-1)}}; }
AknsData<Q> data3() { return {{Q(1), Q(2), Q(-1)}}; }

// Max |coefficient| over claimable sites and degrees [lo, hi].
Q max_over(const SeriesFn<Q>& f, int n_lo, int n_hi, int d_lo, int d_hi) {
  Q best(0);
  for (int n = n_lo; n <= n_hi; ++n) {
    Q v = f.at(n).max_abs(d_lo, d_hi);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace

TEST_CASE("vacuum resolvents are constant projectors") {
  F U(kWin, M(2), M(2), M(2));
  auto s = make_state(data2(), U, 6);
  for (int al = 0; al < 2; ++al) {
    auto Rd = resolvent_dressed(s, al);
    auto Rr = resolvent_direct(data2(), U, al, 6);
    for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n) {
      REQUIRE(Rd.R.at(n).at(0) == M::unit(2, al, al));
      REQUIRE(Rd.R.at(n).max_abs(-6, -1) == 0);
      REQUIRE(Rr.R.at(n) == Rd.R.at(n));
    }
  }
}

TEST_CASE("resolvent identities on random states") {
  Rng rng(17);
  const int N = 8;
  for (auto data : {data2(), data3()}) {
    const int m = data.m();
    F U = random_potential<Q>(rng, m, kWin, -2, 2);
    auto s = make_state(data, U, N);
    std::vector<Resolvent<Q>> R;
    for (int al = 0; al < m; ++al) R.push_back(resolvent_dressed(s, al));

    for (int al = 0; al < m; ++al) {
      SeriesFn<Q> C = commutator_with_L(R[static_cast<std::size_t>(al)].R, data, U);
      REQUIRE(C.at(0).valid_lo() == -N + 1);
      REQUIRE(max_over(C, s.claim_lo(), s.claim_hi(), -N + 1, 1) == 0);

      auto direct = resolvent_direct(data, U, al, N);
      for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n)
        for (int d = -N; d <= 0; ++d)
          REQUIRE(direct.R.at(n).at(d) == R[static_cast<std::size_t>(al)].R.at(n).at(d));
    }

    for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
      S sum(m, -N, 0);
      for (int al = 0; al < m; ++al) {
        const S& ra = R[static_cast<std::size_t>(al)].R.at(n);
        sum = sum + ra;
        for (int be = 0; be < m; ++be) {
          const S& rb = R[static_cast<std::size_t>(be)].R.at(n);
          S prod = ra * rb;
          S expect = al == be ? rb : S(m, -N, 0);
          for (int d = prod.valid_lo(); d <= 0; ++d) REQUIRE(prod.at(d) == expect.at(d));
        }
      }
      REQUIRE(sum.at(0) == M::identity(m));
      REQUIRE(sum.max_abs(-N, -1) == 0);
    }
  }
}

TEST_CASE("linear combinations of resolvents commute with L") {
  Rng rng(23);
  const int N = 8;
  auto data = data3();
  F U = random_potential<Q>(rng, 3, kWin, -2, 2);
  auto s = make_state(data, U, N);
  auto R1 = resolvent_dressed(s, 0).R;
  auto R2 = resolvent_dressed(s, 2).R;
  S c(1, -3, 0, true), f(1, -2, 0, true);
  for (int d = -3; d <= 0; ++d) c[d](0, 0) = rng.rational<Q>(3, 4);
  for (int d = -2; d <= 0; ++d) f[d](0, 0) = rng.rational<Q>(3, 4);
  SeriesFn<Q> combo = R1.map([&](const S& x) { return scale(c, x); }) +
                      R2.map([&](const S& x) { return scale(f, x); });
  SeriesFn<Q> C = commutator_with_L(combo, data, U);
  REQUIRE(max_over(C, s.claim_lo(), s.claim_hi(), C.at(0).valid_lo(), 1) == 0);

  // Products of resolvents also commute with L.
  SeriesFn<Q> prod = R1 * R2 + R1 * R1;
  SeriesFn<Q> Cp = commutator_with_L(prod, data, U);
  REQUIRE(max_over(Cp, s.claim_lo(), s.claim_hi(), Cp.at(0).valid_lo(), 1) == 0);
}

TEST_CASE("commutator with L, hand expansion") {
  F U(kWin, M(2), M(2), M(2));
  auto data = data2();
  SeriesFn<Q> P = SeriesFn<Q>::constant(kWin, S::constant(M::unit(2, 0, 0)));
  SeriesFn<Q> C = commutator_with_L(P, data, U);
  REQUIRE(C.at(0).max_abs(-10, 10) == 0);

  // -z[E12 A - A E12] = -z(a_2 - a_1) E12 = 2z E12 for A = diag(1, -1).
  SeriesFn<Q> P12 = SeriesFn<Q>::constant(kWin, S::constant(M::unit(2, 0, 1)));
  SeriesFn<Q> C12 = commutator_with_L(P12, data, U);
  for (int n = C12.claim_lo(); n <= C12.claim_hi(); ++n) {
    REQUIRE(C12.at(n).at(1) == M::unit(2, 0, 1) * Q(2));
    REQUIRE(C12.at(n).at(0).is_zero());
  }

  SeriesFn<Q> Q1 = SeriesFn<Q>::constant(kWin, S::constant(M::unit(2, 1, 0)));
  SeriesFn<Q> D = commutator_D(P12, Q1);
  REQUIRE(D.at(0).at(0) == M::unit(2, 0, 0) - M::unit(2, 1, 1));
}

TEST_CASE("non-diagonal seed is rejected") {
  F U(kWin, M(2), M(2), M(2));
  REQUIRE_THROWS_AS(resolvent_direct_seed(data2(), U, M::unit(2, 0, 1), 4), input_error);
}

TEST_CASE("B projections") {
  Rng rng(31);
  F U = random_potential<Q>(rng, 2, kWin, -2, 2);
  auto s = make_state(data2(), U, 8);
  auto R = resolvent_dressed(s, 0).R;
  auto P0 = projector_B(R, 0);
  auto P2 = projector_B(R, 2);
  for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n) {
    REQUIRE(P0.B.at(n).at(0) == M::unit(2, 0, 0));
    REQUIRE(P0.B.at(n).hi() == 0);
    for (int i = 1; i <= 8; ++i) REQUIRE(P0.Bbar.at(n).at(-i) == R.at(n).at(-i));
    REQUIRE(P2.B.at(n).hi() == 2);
    for (int d = 0; d <= 2; ++d) REQUIRE(P2.B.at(n).at(d) == R.at(n).at(d - 2));
    S back = P2.B.at(n) + P2.Bbar.at(n);
    S zR = R.at(n).times_z(2);
    for (int d = zR.valid_lo(); d <= 2; ++d) REQUIRE(back.at(d) == zR.at(d));
  }
  REQUIRE_THROWS_AS(projector_B(R, 8), validity_error);
}

TEST_CASE("flow field closed form and consistency") {
  F U(kWin, M(2), M(2), M(2));
  Rng rng(41);
  for (int n = -3; n <= 3; ++n) {
    U[n](0, 1) = rng.rational<Q>(3, 4);
    U[n](1, 0) = rng.rational<Q>(3, 4);
  }
  auto s = make_state(data2(), U, 8);
  auto f0 = flow_field(s, 0, 0);
  REQUIRE(f0.positive_residual == 0);
  REQUIRE(f0.diagonal_residual == 0);
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) {
    M expect(2);
    expect(0, 1) = U.at(n)(0, 1);
    expect(1, 0) = -U.at(n)(1, 0);
    REQUIRE(f0.field.at(n) == expect);
  }

  F Uv(kWin, M(2), M(2), M(2));
  auto vac = make_state(data2(), Uv, 8);
  for (int k = 0; k <= 2; ++k) {
    auto fv = flow_field(vac, k, 1);
    for (int n = kWin.store_lo(); n <= kWin.store_hi(); ++n) REQUIRE(fv.field.at(n).is_zero());
  }
  REQUIRE_THROWS_AS(flow_field(s, 7, 0), validity_error);
}

TEST_CASE("impulse flow matches a deeper solve") {
  F U = impulse_potential<Q>(2, kWin, 0, 0, 1);
  auto s = make_state(data2(), U, 8);
  const Window wide{-8, 8, 14};
  F Uw = impulse_potential<Q>(2, wide, 0, 0, 1);
  auto sw = make_state(data2(), Uw, 12);
  for (int al = 0; al < 2; ++al) {
    auto f = flow_field(s, 1, al);
    auto fw = flow_field(sw, 1, al);
    REQUIRE(f.positive_residual == 0);
    for (int n = s.claim_lo(); n <= s.claim_hi(); ++n) REQUIRE(f.field.at(n) == fw.field.at(n));
  }
}

TEST_CASE("flow diagonal for k >= 1 on a generic potential") {
  Rng rng(43);
  F U = random_potential<Q>(rng, 2, kWin, -2, 2);
  auto s = make_state(data2(), U, 8);
  auto f1 = flow_field(s, 1, 0);
  REQUIRE(f1.positive_residual == 0);
  // The degree-0 diagonal equals a_i Δ R_(2)ii, a total difference that is
  // generically nonzero on a lattice.
  auto R = resolvent_dressed(s, 0).R;
  for (int n = s.claim_lo(); n <= s.claim_hi(); ++n)
    for (int i = 0; i < 2; ++i)
      REQUIRE(f1.field.at(n)(i, i) ==
              data2().a[static_cast<std::size_t>(i)] * (R.at(n + 1).at(-2)(i, i) - R.at(n).at(-2)(i, i)));
}
