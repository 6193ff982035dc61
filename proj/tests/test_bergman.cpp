#include <catch2/catch_amalgamated.hpp>

#include "trquant/bergman.hpp"

using namespace trq;

namespace {
RatFun<Rat> rf(std::vector<Rat> num, std::vector<Rat> den = {Rat(1)}) {
  return RatFun<Rat>(Poly<Rat>(std::move(num)), Poly<Rat>(std::move(den)));
}
}  // namespace

TEST_CASE("airy: algebraic kernel reduces to the global z-kernel exactly") {
  CurveGeometry<Rat> c(rf({Rat(0), Rat(1, 4)}), DivisorSpec{{}, 3, 1}, 20);
  Bergman<Rat> b(c, nullptr, 16);
  // In the z = s parametrization omega_{0,2} = dz dz'/(z-z')^2, so the
  // regular part at (a_0, a_0) vanishes identically.
  const auto& R = b.rect(b.site_of_ram(0), b.site_of_ram(0));
  for (const auto& row : R)
    for (const auto& v : row) CHECK(v == 0);
  // omega_{0,2}(z, sigma z) = -(ds)^2/(4 s^2)
  auto M = b.sigma_kernel(b.site_of_ram(0));
  CHECK(M.coeff(-2) == Rat(-1, 4));
  for (int e = -1; e < 10; ++e) CHECK(M.coeff(e) == 0);
  // eta_{0,k}(z) = (2k+1) s^{-2k-2} ds exactly
  for (int k = 0; k <= 3; ++k) {
    auto E = b.eta_at(b.site_of_ram(0), b.site_of_ram(0), k);
    CHECK(E.coeff(-2 * k - 2) == Rat(2 * k + 1));
    for (int e = -2 * k - 1; e < 8; ++e) CHECK(E.coeff(e) == 0);
  }
  // eta evaluated as a global form: eta_{0,k} = (2k+1) dx / (4 x^{k+1} y)
  Rat x(9), y(3, 2);  // y = sqrt(9)/2 on the principal sheet
  for (int k = 0; k <= 2; ++k) {
    Rat expect = Rat(2 * k + 1) / (4 * y);
    for (int e = 0; e <= k; ++e) expect /= x;
    CHECK(b.eta_eval(k == 0 ? 0 : 0, k, x, y) == expect);
  }
}

TEST_CASE("g0 n_inf=0: kernel matches the rational parametrization kernel") {
  // f = (x^2 - 1)/4 : r_inf = 3, n_inf = 0, g = 0; x = (z + 1/z)/2, y = (z - 1/z)/4
  CurveGeometry<C128> c(rf({Rat(-1, 4), Rat(0), Rat(1, 4)}), DivisorSpec{{}, 3, 0}, 18);
  Bergman<C128> b(c, nullptr, 14);
  auto zmap = [](C128 z) { return (z + C128(1) / z) / C128(2); };
  auto ymap = [](C128 z) { return (z - C128(1) / z) / C128(4); };
  auto dzdx = [](C128 z) { return C128(2) * z * z / (z * z - C128(1)); };
  std::vector<C128> zs = {C128(R128(2.3)), C128(R128(3.1)) + imag_unit<128>() * C128(R128(0.7)),
                          C128(R128(-4.2)) + imag_unit<128>() * C128(R128(1.3))};
  for (const auto& z1 : zs)
    for (const auto& z2 : zs) {
      if (mag(C128(z1 - z2)) < 1e-10) continue;
      C128 x1 = zmap(z1), x2 = zmap(z2);
      C128 want = dzdx(z1) * dzdx(z2) / ((z1 - z2) * (z1 - z2));
      C128 got = b.full_kernel_eval(x1, ymap(z1), x2, ymap(z2));
      CHECK(mag(C128(want - got)) < 1e-28 * mag(want));
    }
  // swap symmetry of the regular rectangles
  for (int A = 0; A < b.num_sites(); ++A)
    for (int B = 0; B < b.num_sites(); ++B) {
      const auto& R1 = b.rect(A, B);
      const auto& R2 = b.rect(B, A);
      for (size_t i = 0; i < R1.size(); ++i)
        for (size_t j = 0; j < R1.size(); ++j)
          CHECK(mag(C128(R1[i][j] - R2[j][i])) < 1e-24 * std::max(1.0, mag(R1[i][j])));
    }
}

TEST_CASE("bessel-type double-pole curve: rectangles exact and symmetric") {
  DivisorSpec div{{PoleSpec{Rat(0), 1}}, 2, 1};
  CurveGeometry<Rat> c(rf({Rat(1, 4), Rat(1, 4)}, {Rat(0), Rat(0), Rat(1)}), div, 20);
  Bergman<Rat> b(c, nullptr, 14);
  int A = b.site_of_ram(0);
  const auto& R = b.rect(A, A);
  const auto& Rpp = b.rect(b.site_of_pole(PolePoint{0, 0}), b.site_of_pole(PolePoint{0, 1}));
  const auto& Rpp2 = b.rect(b.site_of_pole(PolePoint{0, 1}), b.site_of_pole(PolePoint{0, 0}));
  for (size_t i = 0; i < R.size(); ++i)
    for (size_t j = 0; j < R.size(); ++j) {
      CHECK(R[i][j] == R[j][i]);
      CHECK(Rpp[i][j] == Rpp2[j][i]);
    }
}

TEST_CASE("weierstrass g1: A-periods of omega_{0,2} vanish after correction") {
  CurveGeometry<C128> c(rf({Rat(0), Rat(-4), Rat(0), Rat(4)}), DivisorSpec{{}, 4, 1}, 20);
  MarkedCurve<C128> mc(c);
  Bergman<C128> b(c, &mc, 14);

  // residual at 5 test points z2 (criterion: < 1e-10)
  for (int t = 0; t < 5; ++t) {
    C128 x2 = c.base_point() + from_rat<C128>(Rat(2 + t, 3)) +
              imag_unit<128>() * from_rat<C128>(Rat(1 + t, 4));
    C128 y2 = c.y_principal(x2);
    C128 Y2 = y2 * c.D().eval(x2);
    auto integrand = [&](const C128& x1, const C128& Y1) {
      return b.full_kernel_eval(x1, Y1, x2, Y2);
    };
    C128 period = mc.cycle_integral(mc.a_cycle(0), integrand, 1e-24);
    INFO("t=" << t << " |period| = " << mag(period));
    CHECK(mag(period) < 1e-10);
  }

  // swap symmetry at sample pairs
  C128 xa = c.base_point() * C128(R128(1.3));
  C128 xb = c.base_point() + imag_unit<128>() * C128(2);
  C128 Ya = c.y_principal(xa) * c.D().eval(xa);
  C128 Yb = c.y_principal(xb) * c.D().eval(xb);
  C128 k1 = b.full_kernel_eval(xa, Ya, xb, Yb);
  C128 k2 = b.full_kernel_eval(xb, Yb, xa, Ya);
  CHECK(mag(C128(k1 - k2)) < 1e-25 * std::max(1.0, mag(k1)));

  // involution symmetry omega02(sigma z1, sigma z2) = omega02(z1, z2)
  C128 k3 = b.full_kernel_eval(xa, -Ya, xb, -Yb);
  CHECK(mag(C128(k1 - k3)) < 1e-25 * std::max(1.0, mag(k1)));

  // eta forms: vanishing A-periods (quadrature, tol 1e-10) and sigma-oddness
  for (int j = 0; j < 3; ++j) {
    auto form = [&](const C128& x, const C128& Y) { return b.eta_eval(j, 0, x, Y); };
    C128 per = mc.cycle_integral(mc.a_cycle(0), form, 1e-22);
    INFO("eta_{" << j << ",0} A-period " << mag(per));
    CHECK(mag(per) < 1e-10);
  }
  // sigma-oddness at a sample point: eta(sigma z) = -eta(z)
  C128 e_plus = b.eta_eval(1, 1, xa, Ya);
  C128 e_minus = b.eta_eval(1, 1, xa, -Ya);
  CHECK(mag(C128(e_plus + e_minus)) < 1e-25 * std::max(1.0, mag(e_plus)));
}
