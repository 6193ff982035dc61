#include <catch2/catch_amalgamated.hpp>

#include "trquant/wave.hpp"

using namespace trq;

namespace {
RatFun<Rat> rf(std::vector<Rat> num, std::vector<Rat> den = {Rat(1)}) {
  return RatFun<Rat>(Poly<Rat>(std::move(num)), Poly<Rat>(std::move(den)));
}

struct AiryW {
  CurveGeometry<Rat> c;
  Bergman<Rat> b;
  TREngine<Rat> tr;
  Variations<Rat> var;
  WaveData<Rat> wave;
  AiryW()
      : c(rf({Rat(0), Rat(1, 4)}), DivisorSpec{{}, 3, 1}, 30),
        b(c, nullptr, 24),
        tr(c, b),
        var(tr, nullptr),
        wave(tr, var, PolePoint{-1, 0}, 3) {}
};
}  // namespace

TEST_CASE("airy S_{-1}: x^{3/2}/3 with the n_inf = 1 template") {
  AiryW s;
  const auto& sm1 = s.wave.S(-1);
  // chart xi = x^{-1/2}: x^{3/2} = xi^{-3}
  CHECK(sm1.series.coeff(-3) == Rat(1, 3));
  CHECK(sm1.log_coeff == 0);  // no residue at b_inf for the airy curve
  // no other terms: y dx integrates exactly
  for (int e = -2; e < 8; ++e) CHECK(sm1.series.coeff(e) == 0);
  // singular part matches -hbar^{-1} sum T_k x^{(2k-3)/2}/(2k-3) termwise
  Rat T3 = s.c.time_value(TimeId{-1, 3});
  CHECK(sm1.series.coeff(-3) == -T3 / 3);
}

TEST_CASE("airy S_0: the universal -log(x)/4 term") {
  AiryW s;
  const auto& s0 = s.wave.S(0);
  // S0 = -(1/2) log(2 z) = const + (1/2) log xi: log-coefficient 1/2, which
  // is -1/4 in log x units
  CHECK(s0.log_coeff == Rat(1, 2));
  for (int e = -6; e < 8; ++e) CHECK(s0.series.coeff(e) == 0);
}

TEST_CASE("airy S_1, S_2: classical airy-function asymptotics") {
  AiryW s;
  // independent oracle: WKB coefficients of (hbar^2 d^2 - x/4) psi = 0 give
  // S_1 = 5/(24 x^{3/2}), S_2 = 5/(16 x^3)
  const auto& s1 = s.wave.S(1);
  CHECK(s1.series.coeff(3) == Rat(5, 24));
  for (int e = -4; e < 3; ++e) CHECK(s1.series.coeff(e) == 0);
  const auto& s2 = s.wave.S(2);
  CHECK(s2.series.coeff(6) == Rat(5, 16));
  for (int e = -4; e < 6; ++e) CHECK(s2.series.coeff(e) == 0);
}

TEST_CASE("psi_- equals psi_+ at -hbar (S parity bookkeeping)") {
  AiryW s;
  for (int k = -1; k <= 3; ++k) {
    auto plus = s.wave.S(k);
    auto minus = s.wave.S_minus(k);
    Rat sign = (k % 2 == 0) ? 1 : -1;
    CHECK((minus.series - sign * plus.series).known_zero());
    CHECK(minus.log_coeff == sign * plus.log_coeff);
  }
}

TEST_CASE("bessel-type curve: finite-pole template with T_{1,1} log term") {
  DivisorSpec div{{PoleSpec{Rat(0), 1}}, 2, 1};
  CurveGeometry<Rat> c(rf({Rat(1, 4), Rat(1, 4)}, {Rat(0), Rat(0), Rat(1)}), div, 30);
  Bergman<Rat> b(c, nullptr, 24);
  TREngine<Rat> tr(c, b);
  Variations<Rat> var(tr, nullptr);
  WaveData<Rat> wave(tr, var, PolePoint{0, 0}, 2);
  // S_{-1} at b_0^+: + T_{1,1} log(x - X) + regular
  CHECK(wave.S(-1).log_coeff == Rat(1, 2));
  // at the infinite pole the residues cancel: no log term
  WaveData<Rat> winf(tr, var, PolePoint{-1, 0}, 2);
  CHECK(winf.S(-1).log_coeff == 0);
  CHECK(winf.S(0).log_coeff == Rat(1, 2));  // universal -log(x)/4
}

TEST_CASE("weierstrass g1: F02 regularization route-independence and S0'") {
  CurveGeometry<C128> c(rf({Rat(0), Rat(-4), Rat(0), Rat(4)}), DivisorSpec{{}, 4, 1}, 26);
  MarkedCurve<C128> mc(c);
  Bergman<C128> b(c, &mc, 16);
  TREngine<C128> tr(c, b);
  Variations<C128> var(tr, &mc);

  auto point = [&](double xd) {
    C128 x = C128(R128(xd));
    C128 Y = c.y_principal(x) * c.D().eval(x);
    return std::make_pair(x, Y);
  };
  auto [x1, Y1] = point(6.0);
  auto [x2, Y2] = point(7.3);

  C128 v01 = f02_value<C128>(c, b, 0, 1, x1, Y1, x2, Y2);
  C128 v12 = f02_value<C128>(c, b, 1, 2, x1, Y1, x2, Y2);
  C128 v20 = f02_value<C128>(c, b, 2, 0, x1, Y1, x2, Y2);
  INFO("F02 = " << v01.real() << ", alt " << v12.real() << ", " << v20.real());
  CHECK(mag(C128(v01 - v12)) < 1e-10);
  CHECK(mag(C128(v01 - v20)) < 1e-10);

  // S0' series against a finite difference of the diagonal F02/2
  WaveData<C128> wave(tr, var, PolePoint{-1, 0}, 1);
  auto s0p = wave.S(0).derivative();  // d/dv including the log slot
  // convert to d/dx via 1/x'(v), evaluate at x0
  double x0 = 9.0;
  C128 x0f = C128(R128(x0));
  C128 v0 = wave.chart_v(x0f);
  Series<C128> dxdv = chart_dx_series<C128>(wave.chart(), 24);
  C128 ds_dx = s0p.eval(v0) / dxdv.eval(v0);
  double del = 1e-3;
  auto diag = [&](double xd) {
    auto [xx, YY] = point(xd);
    return f02_value<C128>(c, b, 0, 1, xx, YY, xx, YY) / C128(2);
  };
  C128 fd = (diag(x0 + del) - diag(x0 - del)) / C128(R128(2 * del));
  INFO("S0' series " << ds_dx.real() << " vs FD " << fd.real());
  CHECK(mag(C128(ds_dx - fd)) < 1e-5 * std::max(1.0, mag(fd)));
}
