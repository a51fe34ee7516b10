#include <catch_amalgamated.hpp>

#include <cmath>

#include "dakns/bilinear.hpp"

using namespace dakns;
using Q = Rational;
using M = Matrix<Q>;
using F = MatFn<Q>;

namespace {

const Window kWin{-8, 8, 10};

AknsData<Q> data2() { return {{Q(1), Q(-1)}}; }
AknsData<Q> data3() { return {{Q(1), Q(2), Q(-1)}}; }

BilinearOptions opts(int l, int md, DerivativeWord w) {
  BilinearOptions o;
  o.l_max = l;
  o.m_delta = md;
  o.word = std::move(w);
  return o;
}

}  // namespace

TEST_CASE("vacuum passes every bilinear check") {
  F U(kWin, M(2), M(2), M(2));
  auto s = make_state(data2(), U, 8);
  for (int md : {0, 1})
    for (int k : {0, 1, 2})
      for (int al : {0, 1}) {
        auto r = bilinear_residual(s, opts(8 - k - md - 1, md, {{k, al}}));
        REQUIRE(r.residual == 0);
      }
  REQUIRE(bilinear_residual(s, opts(3, 0, {})).residual == 0);
}

TEST_CASE("impulse state, analytic path, (1,1) word") {
  F U = impulse_potential<Q>(2, kWin, 0, 0, 1);
  auto s = make_state(data2(), U, 8);
  auto r = bilinear_residual(s, opts(6, 0, {{1, 0}}));
  REQUIRE(r.residual == 0);
  REQUIRE(r.valid_lo == 1 - 8);
}

TEST_CASE("analytic path vanishes exactly on random states") {
  Rng rng(51);
  const int N = 10;
  for (auto d : {data2(), data3()}) {
    F U = random_potential<Q>(rng, d.m(), kWin, -2, 2);
    auto s = make_state(d, U, N);
    for (int md : {0, 1})
      for (int k : {0, 1, 2})
        for (int al = 0; al < d.m(); ++al) {
          auto r = bilinear_residual(s, opts(6, md, {{k, al}}));
          REQUIRE(r.residue_max == 0);
          REQUIRE(r.negative_max == 0);
        }
  }
}

TEST_CASE("depth budget and path errors") {
  F U(kWin, M(2), M(2), M(2));
  auto s = make_state(data2(), U, 8);
  REQUIRE_THROWS_AS(bilinear_residual(s, opts(6, 1, {{1, 0}})), validity_error);
  REQUIRE_NOTHROW(bilinear_residual(s, opts(5, 1, {{1, 0}})));
  REQUIRE_THROWS_AS(bilinear_residual(s, opts(0, 2, {})), input_error);
  auto num = opts(1, 0, {{1, 0}});
  num.path = DerivativePath::numeric;
  REQUIRE_THROWS_AS(bilinear_residual(s, num), input_error);
  REQUIRE_THROWS_AS(bilinear_residual(s, opts(1, 0, {{0, 0}, {0, 1}, {0, 0}})), input_error);
}

TEST_CASE("a corrupted dressing is detected") {
  Rng rng(61);
  F U = random_potential<Q>(rng, 2, kWin, -2, 2);
  auto s = make_state(data2(), U, 8);
  REQUIRE(bilinear_residual(s, opts(3, 1, {})).residual == 0);
  s.dressing.w[2][1](0, 1) += 1;
  REQUIRE(bilinear_residual(s, opts(3, 1, {})).residual > 0);
  REQUIRE(dressing_residual(s) > 0);
}

TEST_CASE("numeric path converges at second order where the dressing is bounded") {
  // Distinct moduli: every off-diagonal recursion contracts.
  const AknsData<double> d{{1.0, 2.0}};
  MatFn<double> U = impulse_potential<double>(2, kWin, 0, 0, 1, 0.1);
  U[0](1, 0) = -0.05;
  auto s = make_state(d, U, 10);
  for (const DerivativeWord& w : {DerivativeWord{{1, 0}}, DerivativeWord{{2, 1}}, DerivativeWord{{1, 0}, {1, 1}}}) {
    double res[2];
    for (int r = 0; r < 2; ++r) {
      BilinearOptions o;
      o.l_max = 3;
      o.m_delta = 1;
      o.word = w;
      o.path = DerivativePath::numeric;
      o.fd_step = 1e-3 / (1 << r);
      res[r] = bilinear_residual(s, o).residual;
    }
    REQUIRE(res[1] <= 1e-8);
    REQUIRE(std::log2(res[0] / res[1]) == Catch::Approx(2.0).margin(0.1));
  }
}

TEST_CASE("adjoint operator and dual Baker") {
  F U0(kWin, M(2), M(2), M(2));
  auto vac = make_state(data2(), U0, 6);
  F f(kWin, M(2), M(2), M(2)), g(kWin, M(2), M(2), M(2));
  f[0] = M::unit(2, 0, 1);
  g[0] = M::unit(2, 1, 0);
  auto rv = adjoint_check(vac, f, g);
  REQUIRE(rv.adjointness == 0);
  REQUIRE(rv.dual_baker == 0);

  Rng rng(71);
  F U = impulse_potential<Q>(3, kWin, 1, 0, 2, Q(3, 2));
  auto s = make_state(data3(), U, 6);
  F fr = random_compact<Q>(rng, 3, kWin, -4, 4, Q(1));
  F gr = random_compact<Q>(rng, 3, kWin, -5, 3, Q(1));
  auto r = adjoint_check(s, fr, gr);
  REQUIRE(r.adjointness == 0);
  REQUIRE(r.dual_baker == 0);
  REQUIRE(r.top_defect == 0);

  F bad(kWin, M(3), M(3), M(3));
  bad[kWin.store_hi()] = M::identity(3);
  REQUIRE_THROWS_AS(adjoint_check(s, bad, gr), input_error);
}
