#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "trquant/fields.hpp"
#include "trquant/hbar.hpp"
#include "trquant/poly.hpp"
#include "trquant/ratfun.hpp"
#include "trquant/series.hpp"

using namespace trq;

namespace {

Rat rq(long n, long d = 1) { return Rat(n) / Rat(d); }

Series<Rat> random_series(std::mt19937& rng, int lead, int ord) {
  std::uniform_int_distribution<long> num(-6, 6);
  std::uniform_int_distribution<long> den(1, 4);
  std::vector<Rat> c;
  for (int e = lead; e < ord; ++e) c.push_back(rq(num(rng), den(rng)));
  return Series<Rat>::from_coeffs(c, lead, ord);
}

}  // namespace

TEST_CASE("exact rationals are normalized") {
  Rat a = rq(4, 8);
  CHECK(rat_num(a) == 1);
  CHECK(rat_den(a) == 2);
  CHECK(sqrt_exact(rq(9, 4)) == rq(3, 2));
  CHECK_THROWS_AS(sqrt_exact(rq(2)), error);
}

TEST_CASE("geometric series: expand_at(1/(1-x), 0, 1, 3)") {
  RatFun<Rat> f(Poly<Rat>(Rat(1)), Poly<Rat>(std::vector<Rat>{Rat(1), Rat(-1)}));
  auto fs = expand_at<Rat>(f, Chart<Rat>{ChartKind::finite_reg, Rat(0)}, 4);
  CHECK(fs.series.coeff(0) == 1);
  CHECK(fs.series.coeff(1) == 1);
  CHECK(fs.series.coeff(2) == 1);
  CHECK(fs.series.coeff(3) == 1);
}

TEST_CASE("expand_at(x, inf, 1/2) has leading exponent -1 in x^{-1/2}") {
  RatFun<Rat> f(Poly<Rat>::x());
  auto fs = expand_at<Rat>(f, Chart<Rat>{ChartKind::inf_sqrt, Rat(0)}, 3, /*allow_half=*/true);
  CHECK(fs.series.valuation() == -2);           // x = v^{-2}
  CHECK(fs.lead_x2() == 2);                      // x-exponent 1 (doubled: 2)
  CHECK(fs.series.coeff(-2) == 1);

  // StepMismatch at an ordinary point
  CHECK_THROWS_AS(expand_at<Rat>(f, Chart<Rat>{ChartKind::finite_sqrt, Rat(1)}, 3, false), error);
}

TEST_CASE("expand_at((x^2+1)/x, 0, 1, 2) = x^{-1} + x") {
  RatFun<Rat> f(Poly<Rat>(std::vector<Rat>{Rat(1), Rat(0), Rat(1)}), Poly<Rat>::x());
  auto fs = expand_at<Rat>(f, Chart<Rat>{ChartKind::finite_reg, Rat(0)}, 4);
  CHECK(fs.series.coeff(-1) == 1);
  CHECK(fs.series.coeff(0) == 0);
  CHECK(fs.series.coeff(1) == 1);
  CHECK(fs.series.coeff(2) == 0);
}

TEST_CASE("series inverse examples") {
  // inverse of (1+s)
  auto one_plus = Series<Rat>::from_coeffs({Rat(1), Rat(1)}, 0, 6);
  auto inv = one_plus.inverse();
  for (int e = 0; e < 4; ++e) CHECK(inv.coeff(e) == ((e % 2 == 0) ? 1 : -1));
  // inverse of 2s
  auto two_s = Series<Rat>::monomial(Rat(2), 1, 5);
  auto inv2 = two_s.inverse();
  CHECK(inv2.coeff(-1) == rq(1, 2));
  // zero leading coefficient
  CHECK_THROWS_AS(Series<Rat>::zero(3).inverse(), error);
}

TEST_CASE("ring axioms on random exact series (to truncation order)") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    auto a = random_series(rng, -2, 5);
    auto b = random_series(rng, 0, 6);
    auto c = random_series(rng, -1, 4);
    auto lhs = (a * b) * c;
    auto rhs = a * (b * c);
    CHECK((lhs - rhs).known_zero());
    auto d1 = a * (b + c);
    auto d2 = a * b + a * c;
    CHECK((d1 - d2).known_zero());
  }
}

TEST_CASE("series sqrt and inverse of odd branch series") {
  // y = s*sqrt(1/4 + s^2): square back
  auto under = Series<Rat>::from_coeffs({rq(1, 4), Rat(0), Rat(1)}, 0, 10);
  auto y = Series<Rat>::monomial(Rat(1), 1, 11) * under.sqrt();
  CHECK((y * y - Series<Rat>::monomial(Rat(1), 2, 11) * under).known_zero());
  // leading exponent of 1/y is -1
  CHECK(y.inverse().valuation() == -1);
  CHECK((y * y.inverse() - Series<Rat>::one(8)).known_zero());
}

TEST_CASE("expand_at then evaluate matches direct rational evaluation") {
  RatFun<C128> f(poly_cast<C128>(Poly<Rat>(std::vector<Rat>{rq(3), rq(-1), rq(2)})),
                 poly_cast<C128>(Poly<Rat>(std::vector<Rat>{rq(5), rq(1)})));
  auto fs = expand_at<C128>(f, Chart<C128>{ChartKind::finite_reg, C128(1)}, 18);
  for (int k = 0; k < 20; ++k) {
    C128 v = C128(1) + C128(k + 1) / C128(400);  // inside convergence radius
    C128 direct = f.eval(v);
    C128 via = fs.series.eval(v - C128(1));
    CHECK(mag(direct - via) / std::max(1.0, mag(direct)) < 1e-12);
  }
}

TEST_CASE("derivative and termwise integration invert each other") {
  std::mt19937 rng(3);
  auto a = random_series(rng, 1, 7);
  auto b = a.derivative().integrated();
  CHECK((a - b).known_zero());
}

TEST_CASE("hbar series arithmetic and exp") {
  using H = HSeries<Rat>;
  // exp(hbar*a) to M=2 -> 1 + a hbar + a^2/2 hbar^2
  Rat a = rq(3, 2);
  H log = H::term(1, a, 2);
  auto e = hbar_exp(log, 2);
  CHECK(!e.has_minus1);
  CHECK(!e.has_zero);
  CHECK(e.tail.at_or(1, Rat(0)) == a);
  CHECK(e.tail.at_or(2, Rat(0)) == a * a / 2);

  // exp(hbar^{-1}*0 + hbar^0*c) -> prefactor form, unit series
  H log2(3);
  log2.set(0, rq(5));
  auto e2 = hbar_exp(log2, 3);
  CHECK(e2.has_zero);
  CHECK(e2.zero == rq(5));
  CHECK(e2.tail.terms().empty());

  CHECK_THROWS_AS(hbar_exp(log2, -1), error);

  // min-truncation in products
  H u = H::term(0, Rat(1), 2);
  H v = H::term(1, Rat(1), 5);
  CHECK((u * v).trunc() == 3);
}

TEST_CASE("LogQ: prime-split logs with exact equality") {
  auto l6 = LogQ::log_of(rq(6));
  auto l2 = LogQ::log_of(rq(2));
  auto l3 = LogQ::log_of(rq(3));
  CHECK(l6 == l2 + l3);
  auto lm = LogQ::log_of(rq(-4, 9));
  CHECK(lm.ipi == 1);
  CHECK((lm - LogQ::log_of(rq(4, 9))).logs.empty());
  LogQ e = l2 * rq(3);  // log 8
  CHECK(e.exp_is_rational());
  CHECK(e.exp_rational() == 8);
  CHECK(mag<C128>(l6.eval<C128>() - C128(log(R128(6)))) < 1e-30);
}

TEST_CASE("polynomial euclidean structure") {
  auto p = Poly<Rat>(std::vector<Rat>{rq(-1), rq(0), rq(1)});  // x^2 - 1
  auto d = Poly<Rat>(std::vector<Rat>{rq(1), rq(1)});           // x + 1
  Poly<Rat> q, r;
  Poly<Rat>::divmod(p, d, q, r);
  CHECK(r.is_zero());
  CHECK(q == Poly<Rat>(std::vector<Rat>{rq(-1), rq(1)}));
  CHECK(Poly<Rat>::gcd(p, d) == d);
  RatFun<Rat> f(p, d);  // reduces to x - 1
  CHECK(f.num().degree() == 1);
  CHECK(f.den().degree() == 0);
}
