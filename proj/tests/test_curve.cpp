#include <catch2/catch_amalgamated.hpp>

#include "trquant/curve.hpp"
#include "trquant/periods.hpp"

using namespace trq;

namespace {
RatFun<Rat> rf(std::vector<Rat> num, std::vector<Rat> den = {Rat(1)}) {
  return RatFun<Rat>(Poly<Rat>(std::move(num)), Poly<Rat>(std::move(den)));
}
}  // namespace

TEST_CASE("airy curve: admissible, g = 0, u = {0}, T_inf3 = -1") {
  // f = x/4, r_inf = 3, n_inf = 1
  CurveGeometry<Rat> c(rf({Rat(0), Rat(1, 4)}), DivisorSpec{{}, 3, 1}, 24);
  auto rd = validate_admissible(c);
  CHECK(rd.genus == 0);
  REQUIRE(rd.u.size() == 1);
  CHECK(rd.u[0] == 0);
  CHECK(rd.infinite_ramification);
  CHECK(c.time_value(TimeId{-1, 3}) == Rat(-1));
  CHECK(c.time_value(TimeId{-1, 2}) == Rat(0));
  // principal-branch series at the ramification point: Y = s/2
  CHECK(c.ram(0).Y.coeff(1) == Rat(1, 2));
  CHECK(c.ram(0).Y.coeff(3) == Rat(0));
}

TEST_CASE("multiple zero is rejected") {
  CHECK_THROWS_MATCHES((CurveGeometry<Rat>(rf({Rat(0), Rat(0), Rat(1)}), DivisorSpec{{}, 3, 0}, 16)),
                       error, Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("multiple zero")));
}

TEST_CASE("degree mismatch with declared divisor is rejected") {
  // f = x/4 with declared r_inf = 4 (needs deg N = 3 at n_inf = 1)
  CHECK_THROWS_AS((CurveGeometry<Rat>(rf({Rat(0), Rat(1, 4)}), DivisorSpec{{}, 4, 1}, 16)), error);
}

TEST_CASE("double-pole exact curve: f = (x+1)/(4x^2)") {
  DivisorSpec div{{PoleSpec{Rat(0), 1}}, 2, 1};
  CurveGeometry<Rat> c(rf({Rat(1, 4), Rat(1, 4)}, {Rat(0), Rat(0), Rat(1)}), div, 24);
  CHECK(c.genus() == 0);
  REQUIRE(c.num_branch() == 1);
  CHECK(c.ram(0).u == Rat(-1));
  CHECK(c.time_value(TimeId{-1, 2}) == Rat(-1));
  CHECK(c.time_value(TimeId{0, 1}) == Rat(1, 2));
  // y-series at the finite pole, principal sheet: y = T/(x) + O(1)
  const auto& pc = c.pole_chart(PolePoint{0, 0});
  CHECK(pc.y.coeff(-1) == Rat(1, 2));
}

TEST_CASE("weierstrass curve g = 1 (q = x^3 - x type), times rational") {
  // f = 4x^3 - 4x: r_inf = 4, n_inf = 1
  CurveGeometry<C128> c(rf({Rat(0), Rat(-4), Rat(0), Rat(4)}), DivisorSpec{{}, 4, 1}, 24);
  CHECK(c.genus() == 1);
  CHECK(c.num_branch() == 3);
  // sorted branch points -1, 0, 1
  CHECK(mag(C128(c.ram(0).u + C128(1))) < 1e-30);
  CHECK(mag(C128(c.ram(1).u)) < 1e-30);
  CHECK(mag(C128(c.ram(2).u - C128(1))) < 1e-30);
  CHECK(mag(C128(c.time_value(TimeId{-1, 4}) + C128(4))) < 1e-30);
  CHECK(mag(C128(c.time_value(TimeId{-1, 3}))) < 1e-30);
  CHECK(mag(C128(c.time_value(TimeId{-1, 2}) - C128(2))) < 1e-30);
}

TEST_CASE("generic n_inf = 0 leading template: f with T^2 x^6 behavior") {
  // f = 4x^6 + x^2 + 1 : r_inf = 5, n_inf = 0 ... deg N = 2g+2, g = 2
  CurveGeometry<C128> c(rf({Rat(1), Rat(0), Rat(1), Rat(0), Rat(0), Rat(0), Rat(4)}),
                        DivisorSpec{{}, 5, 0}, 20);
  CHECK(c.genus() == 2);
  // y ~ -T_{inf,5} x^3 on the principal sheet; leading coefficient of y is
  // +2 there (branch rule), so T_{inf,5} = -2
  CHECK(mag(C128(c.time_value(TimeId{-1, 5}) + C128(2))) < 1e-30);
}

TEST_CASE("periods: g = 0 curve has empty period vector") {
  CurveGeometry<C128> c(rf({Rat(0), Rat(1, 4)}), DivisorSpec{{}, 3, 1}, 16);
  MarkedCurve<C128> mc(c);
  CHECK(mc.compute_periods().empty());
}

TEST_CASE("periods: y^2 = (x^2-1)(x^2-4), A-cycle around [1,2]") {
  // f = (x^2-1)(x^2-4) = x^4 -5x^2 +4 : n_inf = 0, r_inf = 4, g = 1
  CurveGeometry<C128> c(rf({Rat(4), Rat(0), Rat(-5), Rat(0), Rat(1)}), DivisorSpec{{}, 4, 0}, 20);
  REQUIRE(c.num_branch() == 4);
  // sorted: -2, -1, 1, 2; choose the cut [1,2] => indices (2,3)
  TorelliMarking mk;
  mk.cuts = {{2, 3}};
  mk.bridges = {{1, 2}};
  MarkedCurve<C128> mc(c, mk);
  auto eps = mc.compute_periods(1e-25);
  REQUIRE(eps.size() == 1);

  // oracle: adaptive quadrature of 2 * int_1^2 y dx at doubled node counts,
  // via the substitution x = (3 - cos(theta))/2 mapping [0,pi] -> [1,2]
  auto yval = [&](double x) {
    return std::sqrt(std::abs((x * x - 1) * (x * x - 4)));
  };
  double acc = 0;
  int n = 20000;
  for (int k = 0; k < n; ++k) {
    double th = M_PI * (k + 0.5) / n;
    double x = 1.5 - 0.5 * std::cos(th);
    double dx = 0.5 * std::sin(th) * M_PI / n;
    acc += yval(x) * dx;
  }
  double oracle = 2 * acc;  // |contour| = 2 * cut integral
  CHECK(std::abs(std::abs(eps[0].real().convert_to<double>()) +
                 std::abs(eps[0].imag().convert_to<double>()) - oracle) < 1e-6 * oracle);
}

TEST_CASE("weierstrass real branch points: period around [e1,e2] real under conjugation") {
  CurveGeometry<C128> c(rf({Rat(0), Rat(-4), Rat(0), Rat(4)}), DivisorSpec{{}, 4, 1}, 20);
  MarkedCurve<C128> mc(c);
  auto eps = mc.compute_periods(1e-25);
  REQUIRE(eps.size() == 1);
  // the integrand on [-1,0] has y^2 = 4x^3-4x >= 0, so the cycle integral is
  // real up to orientation; conjugation-symmetry check:
  double re = std::abs(eps[0].real().convert_to<double>());
  double im = std::abs(eps[0].imag().convert_to<double>());
  CHECK(im < 1e-20 * std::max(1.0, re));
}

TEST_CASE("period matrix of the weierstrass curve has Im tau > 0 convention") {
  CurveGeometry<C128> c(rf({Rat(0), Rat(-4), Rat(0), Rat(4)}), DivisorSpec{{}, 4, 1}, 20);
  MarkedCurve<C128> mc(c);
  auto tau = mc.period_matrix(1e-25);
  REQUIRE(tau.size() == 1);
  double im = tau[0][0].imag().convert_to<double>();
  INFO("tau = " << tau[0][0].real().convert_to<double>() << " + " << im << " i");
  CHECK(std::abs(im) > 1e-6);
}
