#include <catch_amalgamated.hpp>

#include "dakns/random.hpp"
#include "dakns/series.hpp"

using namespace dakns;
using Q = Rational;
using M = Matrix<Q>;
using S = Series<Q>;

namespace {

M mat(std::initializer_list<std::initializer_list<long>> rows) {
  M r(static_cast<int>(rows.size()));
  int i = 0;
  for (auto& row : rows) {
    int j = 0;
    for (long v : row) r(i, j++) = Q(v);
    ++i;
  }
  return r;
}

S random_series(Rng& rng, int m, int lo, int hi, bool exact = false) {
  S s(m, lo, hi, exact);
  for (int d = lo; d <= hi; ++d)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s[d](i, j) = rng.rational<Q>(4, 5);
  return s;
}

S restrict(const S& s, int lo) {
  S r(s.dim(), lo, s.hi());
  for (int d = lo; d <= s.hi(); ++d) r[d] = s.at(d);
  return r;
}

}  // namespace

TEST_CASE("series addition and band union") {
  Rng rng(7);
  S a = random_series(rng, 2, -3, 1);
  S z = a + (-a);
  REQUIRE(z.valid_lo() == -3);
  REQUIRE(z.hi() == 1);
  REQUIRE(z.max_abs() == 0);

  M W = mat({{0, 1}, {2, 0}});
  S s = S::monomial(M::identity(2), 1) + S::monomial(W, -1);
  REQUIRE(s.lo() == -1);
  REQUIRE(s.hi() == 1);
  REQUIRE(s.at(1) == M::identity(2));
  REQUIRE(s.at(0).is_zero());
  REQUIRE(s.at(-1) == W);
}

TEST_CASE("series product") {
  M W = mat({{1, 2}, {3, 4}});
  S a = S::identity(2) + S::monomial(W, -1);
  S b = S::identity(2) - S::monomial(W, -1);
  S p = a * b;
  REQUIRE(p.exact());
  REQUIRE(p.at(0) == M::identity(2));
  REQUIRE(p.at(-1).is_zero());
  REQUIRE(p.at(-2) == -(W * W));

  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be) {
      S e = S::constant(M::unit(3, al, al)) * S::constant(M::unit(3, be, be));
      REQUIRE(e.at(0) == (al == be ? M::unit(3, be, be) : M(3)));
    }
}

TEST_CASE("product validity band against extended inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    S a_full = random_series(rng, 2, -8, 0);
    S b_full = random_series(rng, 2, -8, 1);
    S a = restrict(a_full, -4);
    S b = restrict(b_full, -4);
    S p = a * b;
    REQUIRE(p.valid_lo() == -3);
    S truth = a_full * b_full;
    for (int d = p.valid_lo(); d <= p.hi(); ++d) REQUIRE(p.at(d) == truth.at(d));
    REQUIRE_THROWS_AS(p.at(-4), validity_error);

    // Extending every band by 4 leaves the declared band unchanged.
    S a_ext = restrict(a_full, -8);
    S b_ext = restrict(b_full, -8);
    S p_ext = a_ext * b_ext;
    for (int d = p.valid_lo(); d <= p.hi(); ++d) REQUIRE(p.at(d) == p_ext.at(d));
  }
}

TEST_CASE("ring axioms on random instances") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    S a = random_series(rng, 3, -5, 0);
    S b = random_series(rng, 3, -5, 1);
    S c = random_series(rng, 3, -6, 0);
    S l = (a * b) * c;
    S r = a * (b * c);
    const int lo = std::max(l.valid_lo(), r.valid_lo());
    for (int d = lo; d <= l.hi(); ++d) REQUIRE(l.at(d) == r.at(d));
    S x = a * (b + c);
    S y = a * b + a * c;
    const int lo2 = std::max(x.valid_lo(), y.valid_lo());
    for (int d = lo2; d <= x.hi(); ++d) REQUIRE(x.at(d) == y.at(d));
  }
}

TEST_CASE("series inverse") {
  M N = mat({{0, 5}, {0, 0}});
  S a = S::identity(2) + S::monomial(N, -1);
  S inv = series_inverse(a, 6);
  REQUIRE(inv.at(0) == M::identity(2));
  REQUIRE(inv.at(-1) == -N);
  for (int d = -6; d <= -2; ++d) REQUIRE(inv.at(d).is_zero());

  M W = mat({{0, 1}, {1, 0}});
  S b = S::identity(2) + S::monomial(W, -1);
  S binv = series_inverse(b, 7);
  for (int k = 0; k <= 7; ++k) REQUIRE(binv.at(-k) == (k % 2 == 0 ? M::identity(2) : W) * Q(k % 2 == 0 ? 1 : -1));

  S id = series_inverse(S::identity(3), 4);
  REQUIRE(id.at(0) == M::identity(3));
  REQUIRE(id.max_abs(-4, -1) == 0);

  Rng rng(5);
  S r = random_series(rng, 3, -6, 0);
  r[0] = M::identity(3);
  S rinv = series_inverse(r, 6);
  S one = r * rinv;
  S two = rinv * r;
  REQUIRE(one.valid_lo() == -6);
  REQUIRE(one.at(0) == M::identity(3));
  REQUIRE(one.max_abs(-6, -1) == 0);
  REQUIRE(two.max_abs(-6, -1) == 0);

  REQUIRE_THROWS_AS(series_inverse(r, 7), validity_error);
  REQUIRE_THROWS_AS(series_inverse(S::constant(mat({{1, 1}, {1, 1}})), 2), consistency_error);
}

TEST_CASE("projections") {
  Rng rng(9);
  S R = random_series(rng, 2, -6, 0);
  S zR = R.times_z(2);
  S p = series_plus(zR);
  REQUIRE(p.hi() == 2);
  REQUIRE(p.at(2) == R.at(0));
  REQUIRE(p.at(1) == R.at(-1));
  REQUIRE(p.at(0) == R.at(-2));
  REQUIRE(p.at(-1).is_zero());
  S mn = series_minus(R.times_z(1));
  for (int i = 2; i <= 6; ++i) REQUIRE(mn.at(1 - i) == R.at(-i));
  REQUIRE(mn.hi() == -1);
  S back = p + series_minus(zR);
  for (int d = back.valid_lo(); d <= back.hi(); ++d) REQUIRE(back.at(d) == zR.at(d));

  S poly = S::monomial(M::identity(2), 3) + S::identity(2);
  REQUIRE(series_residue(poly).is_zero());
  REQUIRE(series_residue(R) == R.at(-1));
  REQUIRE_THROWS_AS(series_residue(R.times_z(6)), validity_error);
}

TEST_CASE("float series mirrors rational arithmetic") {
  Series<double> a(2, -2, 0);
  a[0] = Matrix<double>::identity(2);
  a[-1](0, 1) = 0.5;
  Series<double> inv = series_inverse(a, 2);
  Series<double> one = a * inv;
  REQUIRE(one.max_abs(-2, -1) == 0.0);
}
