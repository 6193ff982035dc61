#ifndef TRQUANT_PDE_HPP
#define TRQUANT_PDE_HPP

// The U_{p,k} vector fields, H(x), and the order-by-order verification of
// the wave-function PDE: for every m, at the verification pole,
//   S''_{m-1} + sum_{k1+k2=m-1} S'_{k1} S'_{k2}
//     - sum_U U(x) dS_{m-1}/dT - [m+1 = 2h] sum_U U(x) dF_{h,0}/dT  = 0
// as a local series identity (primes are d/dx).

#include "trquant/wave.hpp"

namespace trq {

template <class F>
struct TimeVectorField {
  std::vector<std::pair<TimeId, RatFun<F>>> terms;  // (p,k) -> U_{p,k}(x)
};

template <class F>
TimeVectorField<F> build_U(Variations<F>& var, const CurveGeometry<F>& c) {
  TimeVectorField<F> out;
  for (int k = 2; k <= c.divisor().r_inf - 2; ++k)
    out.terms.push_back({TimeId{-1, k}, var.U_inf(k)});
  for (int nu = 0; nu < static_cast<int>(c.divisor().finite.size()); ++nu)
    for (int k = 2; k <= c.divisor().finite[static_cast<size_t>(nu)].r + 1; ++k)
      out.terms.push_back({TimeId{nu, k}, var.U_nu(nu, k)});
  return out;
}

struct PDEOrderReport {
  int m;
  double max_residual;
  bool pass;
  bool exact;
};

struct PDEReport {
  std::vector<PDEOrderReport> rows;
  // grading table: hbar power -> contributing genus h of the free-energy term
  std::vector<std::pair<int, int>> grading;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

template <class F>
class PDEVerifier {
 public:
  PDEVerifier(TREngine<F>& tr, Variations<F>& var, WaveData<F>& wave, double tol = 1e-9)
      : tr_(tr), var_(var), wave_(wave), c_(tr.curve()), tol_(tol) {
    U_ = build_U(var_, c_);
    // d/dx conversion: 1/x'(v) in the wave chart
    int W = tr_.bergman().window();
    Series<F> dxdv = chart_dx_series<F>(wave_.chart(), W + 6);
    inv_dx_ = dxdv.inverse().truncated(W);
  }

  const TimeVectorField<F>& U() const { return U_; }

  // H(x) as hbar-graded rational coefficients: hbar^0 -> f, hbar^{2h} ->
  // sum_U U dF_{h,0}/dT for h = 1..hmax
  std::map<int, RatFun<F>> H_of_x(int hmax) {
    std::map<int, RatFun<F>> H;
    H[0] = RatFun<F>(poly_cast<F>(c_.f_rat().num()), poly_cast<F>(c_.f_rat().den()));
    for (int h = 1; h <= hmax; ++h) {
      RatFun<F> acc;
      for (const auto& [id, u] : U_.terms) {
        F d = (h == 1) ? dF10_dT(id) : var_.d_dT_free_energy(h, id);
        acc += RatFun<F>(Poly<F>(d)) * u;
      }
      H[2 * h] = acc;
    }
    return H;
  }

  // d omega_{1,0}/dT via Lemma 3.5 on omega_{1,1}
  F dF10_dT(TimeId id) { return var_.d_dT_free_energy(1, id); }

  PDEOrderReport verify_order(int m) {
    check(m >= -1, errc::insufficient_order, "orders start at m = -1");
    check(m <= wave_.hbar_order(), errc::insufficient_order,
          "wave data truncated below requested order");
    int W = tr_.bergman().window();
    Series<F> residual = Series<F>::o(W - 8);
    if (m == -1) {
      Series<F> s = Dx(wave_.S(-1));
      residual = s * s - f_series();
    } else {
      residual = Dx2(wave_.S(m - 1));
      for (int k1 = -1; k1 <= m; ++k1) {
        int k2 = m - 1 - k1;
        if (k2 < -1 || k2 > m || k1 > k2) continue;
        Series<F> t = Dx(wave_.S(k1)) * Dx(wave_.S(k2));
        residual += (k1 == k2) ? t : (F(2) * t);
      }
      for (const auto& [id, u] : U_.terms) {
        Series<F> us = expand_at<F>(u, wave_.chart(), W - 6, true).series;
        residual -= us * wave_.dS_dT(m - 1, id);
      }
      if ((m + 1) % 2 == 0 && (m + 1) / 2 >= 1) {
        int h = (m + 1) / 2;
        for (const auto& [id, u] : U_.terms) {
          Series<F> us = expand_at<F>(u, wave_.chart(), W - 6, true).series;
          residual -= var_.d_dT_free_energy(h, id) * us;
        }
      }
    }
    PDEOrderReport rep;
    rep.m = m;
    rep.exact = field_traits<F>::is_exact;
    int ord_checked = std::min(residual.order(), W - 12);
    double mx = 0;
    for (int e = residual.valuation(); e < ord_checked; ++e) mx = std::max(mx, mag(residual.coeff(e)));
    rep.max_residual = mx;
    rep.pass = rep.exact ? (mx == 0) : (mx <= tol_);
    return rep;
  }

  PDEReport verify_through(int mmax) {
    PDEReport rep;
    for (int m = -1; m <= mmax; ++m) rep.rows.push_back(verify_order(m));
    for (int h = 1; 2 * h <= mmax + 1; ++h) rep.grading.push_back({2 * h, h});
    return rep;
  }

 private:
  Series<F> Dx(const LogSeries<F>& s) { return (s.derivative() * inv_dx_).truncated(inv_dx_.order() - 2); }
  Series<F> Dx2(const LogSeries<F>& s) {
    Series<F> first = Dx(s);
    return (first.derivative() * inv_dx_).truncated(first.order() - 3);
  }
  Series<F> f_series() {
    RatFun<F> f(poly_cast<F>(c_.f_rat().num()), poly_cast<F>(c_.f_rat().den()));
    int W = tr_.bergman().window();
    return expand_at<F>(f, wave_.chart(), W, true).series;
  }

  TREngine<F>& tr_;
  Variations<F>& var_;
  WaveData<F>& wave_;
  const CurveGeometry<F>& c_;
  double tol_;
  TimeVectorField<F> U_;
  Series<F> inv_dx_ = Series<F>::o(0);
};

}  // namespace trq

#endif
