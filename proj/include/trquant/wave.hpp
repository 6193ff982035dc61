#ifndef TRQUANT_WAVE_HPP
#define TRQUANT_WAVE_HPP

// Integrated correlators and the perturbative wave functions: F_{h,n} with
// the F_{0,2} regularization, and the S_k expansions at a chosen pole with
// their coefficient tables.
//
// Conventions:
//  - S_k series live at the principal preimage of the pole; the two wave
//    functions use the same local data with (+-1)^n weights, so
//    S^-_k = (-1)^k S^+_k (psi_-(x,hbar) = psi_+(x,-hbar)).
//  - Each local series carries an explicit log slot:
//    S = log_coeff * log(chart var) + Laurent series.
//  - S_0' comes from differentiating the two-branch-point regularization:
//        S_0'(x) dx = - int_{a_i}^{sigma z} omega02(., z) + dx/(2(u_i - x)),
//    which needs one series-valued quadrature constant and local data only.

#include "trquant/theta.hpp"
#include "trquant/variations.hpp"

namespace trq {

// local series with a log term: value = log_coeff * log(v) + series(v)
template <class F>
struct LogSeries {
  F log_coeff{0};
  Series<F> series;

  LogSeries() : series(Series<F>::o(0)) {}
  explicit LogSeries(Series<F> s) : series(std::move(s)) {}
  LogSeries(F lc, Series<F> s) : log_coeff(std::move(lc)), series(std::move(s)) {}

  LogSeries operator+(const LogSeries& o) const {
    return {F(log_coeff + o.log_coeff), series + o.series};
  }
  LogSeries operator-(const LogSeries& o) const {
    return {F(log_coeff - o.log_coeff), series - o.series};
  }
  LogSeries scaled(const F& c) const { return {F(c * log_coeff), c * series}; }
  Series<F> derivative() const {
    Series<F> d = series.derivative();
    if (!is_zero_v(log_coeff)) {
      Series<F> lg = Series<F>::monomial(log_coeff, -1, d.order());
      d += lg;
    }
    return d;
  }
};

template <class F>
class WaveData {
 public:
  WaveData(TREngine<F>& tr, Variations<F>& var, PolePoint pole, int M)
      : tr_(tr), var_(var), c_(tr.curve()), b_(tr.bergman()), pole_(pole), M_(M) {
    psite_ = b_.site_of_pole(pole_);
    check(chart_half_step(b_.site(psite_).chart.kind) || pole_.nu >= 0 || c_.n_inf() == 0,
          errc::internal, "chart bookkeeping");
    build();
  }

  const PolePoint& pole() const { return pole_; }
  int hbar_order() const { return M_; }
  int pole_site() const { return psite_; }
  const Chart<F>& chart() const { return b_.site(psite_).chart; }
  int route_branch() const { return route_branch_; }

  // S_k for the + branch; S^-_k = (-1)^k S^+_k
  const LogSeries<F>& S(int k) const {
    check(k >= -1 && k <= M_, errc::insufficient_correlators, "S_k outside computed range");
    return S_.at(static_cast<size_t>(k + 1));
  }
  LogSeries<F> S_minus(int k) const { return (k % 2 == 0) ? S(k) : S(k).scaled(F(-1)); }

  // d S_k/dT as a local series (k >= -1); log parts are T-independent
  Series<F> dS_dT(int k, TimeId id) {
    auto key = std::make_pair(k, id);
    auto it = dS_.find(key);
    if (it != dS_.end()) return it->second;
    Series<F> out = compute_dS_dT(k, id);
    dS_.emplace(key, out);
    return out;
  }

  Series<F> ieta_series(const EtaIdx& a) {
    auto it = ieta_.find(a);
    if (it != ieta_.end()) return it->second;
    Series<F> L = b_.eta_at(psite_, b_.site_of_ram(a.i), a.k);
    Series<F> P = L.integrated();
    P.set_coeff(0, P.coeff(0) + var_.ieta_constant_public(a, pole_));
    ieta_.emplace(a, P);
    return P;
  }

  // diagonal F_{h,n}(z,...,z) as a local series (stable (h,n))
  Series<F> F_diag(int h, int n) { return diag_from_tensor(tr_.omega(h, n)); }

  Series<F> diag_from_tensor(const Correlator<F>& w) {
    int W = b_.window();
    Series<F> acc = Series<F>::o(W - 2);
    for (const auto& [m, v] : w.c) {
      Rat perms = 1;
      for (int i = 2; i <= static_cast<int>(m.size()); ++i) perms *= i;
      size_t run = 1;
      for (size_t i = 1; i <= m.size(); ++i) {
        if (i < m.size() && m[i] == m[i - 1]) {
          ++run;
        } else {
          Rat rf = 1;
          for (size_t r = 2; r <= run; ++r) rf *= static_cast<long>(r);
          perms /= rf;
          run = 1;
        }
      }
      Series<F> prod = Series<F>::one(W - 2);
      for (const auto& a : m) prod *= ieta_series(a);
      acc += (from_rat<F>(perms) * v) * prod;
    }
    return acc;
  }

  // chart-variable value of a numeric x near this pole
  F chart_v(const F& x) const {
    switch (chart().kind) {
      case ChartKind::finite_reg: return x - chart().center;
      case ChartKind::inf_reg: return F(1) / x;
      case ChartKind::inf_sqrt: return F(1) / field_traits<F>::sqrt(x);
      default: fail(errc::internal, "unexpected pole chart");
    }
  }

 private:
  void build();
  LogSeries<F> sminus1_series();
  Series<F> s0_prime_series();
  Series<F> compute_dS_dT(int k, TimeId id);

  TREngine<F>& tr_;
  Variations<F>& var_;
  const CurveGeometry<F>& c_;
  const Bergman<F>& b_;
  PolePoint pole_;
  int M_;
  int psite_;
  int route_branch_ = 0;
  std::vector<LogSeries<F>> S_;
  std::map<EtaIdx, Series<F>> ieta_;
  std::map<std::pair<int, TimeId>, Series<F>> dS_;
};

template <class F>
void WaveData<F>::build() {
  // canonical route: nearest branch point to the pole, index tie-break
  double best = 1e300;
  for (int i = 0; i < c_.num_branch(); ++i) {
    double d;
    if (pole_.nu >= 0) d = mag(F(c_.ram(i).u - c_.pole_x(pole_.nu)));
    else d = 1.0 / std::max(1e-300, mag(c_.ram(i).u));
    if (d < best - 1e-15) {
      best = d;
      route_branch_ = i;
    }
  }

  S_.assign(static_cast<size_t>(M_ + 2), LogSeries<F>());
  S_[0] = sminus1_series();
  {
    Series<F> d = s0_prime_series();
    F logc = d.valuation() <= -1 ? d.coeff(-1) : F(0);
    Series<F> reg = d;
    if (!is_zero_v(logc)) reg.set_coeff(-1, F(0));
    LogSeries<F> s0(logc, reg.integrated());
    if constexpr (field_traits<F>::is_exact) {
      // exact closed form: S0 = -(1/2) log(2 z(x)); constant -(1/2) log 2 is
      // transcendental and tracked by the exact constant table (LogQ) at the
      // driver level; the series slot stays at the derivative-normalized 0.
    }
    S_[1] = s0;
  }
  for (int k = 1; k <= M_; ++k) {
    Series<F> acc = Series<F>::o(b_.window() - 2);
    for (int h = 0;; ++h) {
      int n = k + 2 - 2 * h;
      if (n < 1) break;
      if (2 * h - 2 + n < 1) continue;
      Rat fact = 1;
      for (int i = 2; i <= n; ++i) fact *= i;
      acc += from_rat<F>(1 / fact) * F_diag(h, n);
    }
    S_[static_cast<size_t>(k + 1)] = LogSeries<F>(acc);
  }
}

// S_{-1} = F_{0,1} = int_{a_*}^{z} omega01: template primitive + residue log
// + regularized constant.
template <class F>
LogSeries<F> WaveData<F>::sminus1_series() {
  const auto& pc = c_.pole_chart(pole_);
  int W = b_.window();
  Series<F> dxdv = chart_dx_series<F>(pc.chart, W + 6);
  Series<F> form = (pc.y.truncated(W + 6) * dxdv).truncated(W);
  F logc = form.valuation() <= -1 ? form.coeff(-1) : F(0);
  Series<F> reg = form;
  if (!is_zero_v(logc)) reg.set_coeff(-1, F(0));
  Series<F> prim = reg.integrated();
  F constant(0);
  if constexpr (field_traits<F>::is_exact) {
    // exact mode: single finite branch point u, z = sqrt(x - u) global;
    // the constant is a combination of rationals and logs of rationals,
    // carried by the exact constant table; series slot normalized to it = 0.
  } else {
    F xref;
    if (pole_.nu >= 0) xref = c_.pole_x(pole_.nu) + from_rat<F>(Rat(1, 50));
    else xref = c_.base_point() * F(3);
    F y = c_.y_principal(xref);
    if (pole_.sheet == 1) y = -y;
    F Yref = y * c_.D().eval(xref);
    auto form_xy = [&](const F& x, const F& YY) { return YY / c_.D().eval(x); };
    F val = branch_to_point_integral<F>(c_, c_.ram(route_branch_).u, xref, Yref, form_xy, 1e-24);
    F v = chart_v(xref);
    F local = prim.eval(v);
    if (!is_zero_v(logc)) local += logc * F(log(v));
    constant = val - local;
  }
  prim.set_coeff(0, prim.coeff(0) + constant);
  return LogSeries<F>(logc, prim);
}

// S0'(x) dx = -K(sigma z, z) + dx/(2 (u_i - x)), with
// K(z', z) = int_{a_i}^{z'} omega02(., z); the path splits into a quadrature
// piece to a reference point (series-valued in z) and a local tail.
template <class F>
Series<F> WaveData<F>::s0_prime_series() {
  int W = b_.window();
  const auto& S = b_.site(psite_);
  Series<F> xser = S.x.truncated(W + 6);
  Series<F> dx = S.dx.truncated(W + 6);
  Series<F> Yser = S.Y.truncated(W + 6);

  if constexpr (field_traits<F>::is_exact) {
    // single-branch-point closed form: S0 = -(1/2) log(2 z(x)),
    // z = sqrt(x - u): S0' (per dv) = -(1/2) z'(v)/z(v)
    F u = c_.ram(0).u;
    Series<F> zser;
    if (pole_.nu < 0) {
      Series<F> under = Series<F>::one(W);
      under.set_coeff(2, -u);
      zser = under.sqrt().shifted(-1);
    } else {
      Series<F> under = Series<F>::constant(F(c_.pole_x(pole_.nu) - u), W);
      under.set_coeff(1, F(1));
      zser = under.sqrt();
      F c1 = c_.ram(0).Y.coeff(1);
      const auto& pc = c_.pole_chart(pole_);
      Series<F> Dser = detail::poly_in_chart<F>(c_.D(), pc.chart, W + 4);
      Series<F> ytest = ((c1 * zser) * Dser.inverse()).truncated(W);
      if ((ytest + pc.y.truncated(W)).max_mag() < (ytest - pc.y.truncated(W)).max_mag())
        zser = F(-1) * zser;
    }
    return (from_rat<F>(Rat(-1, 2)) * (zser.derivative() * zser.inverse())).truncated(W - 4);
  } else {
    int ai = route_branch_;
    int aj = -1;
    for (int i = 0; i < c_.num_branch(); ++i)
      if (i != ai) {
        aj = i;
        break;
      }
    check(aj >= 0, errc::coincident_branch_points,
          "S0 regularization needs two distinct finite branch points");
    // use a_i as the first (outer) branch point of the Lemma route
    F ui = c_.ram(ai).u;

    // sigma z in the chart: sqrt chart -> -v; finite two-sheet pole -> the
    // conjugate site with the same chart variable
    bool sqrtc = chart_half_step(chart().kind);
    int sigma_site = psite_;
    if (!sqrtc) sigma_site = b_.site_of_pole(PolePoint{pole_.nu, 1 - pole_.sheet});

    // reference point near the pole on the sigma sheet, chart value vref
    F xref;
    if (pole_.nu >= 0) xref = c_.pole_x(pole_.nu) + from_rat<F>(Rat(1, 37));
    else xref = c_.base_point() * F(4);
    F vref;  // chart value of the sigma-image reference
    {
      switch (chart().kind) {
        case ChartKind::finite_reg: vref = xref - chart().center; break;
        case ChartKind::inf_reg: vref = F(1) / xref; break;
        case ChartKind::inf_sqrt: vref = F(-1) / field_traits<F>::sqrt(xref); break;
        default: fail(errc::internal, "chart");
      }
    }
    F yref = c_.y_principal(xref);
    // sigma image of the principal-sheet point above xref
    F Yref_sigma = -yref * c_.D().eval(xref);
    if (pole_.sheet == 1) Yref_sigma = -Yref_sigma;

    // C(v) = int_{a_i}^{(xref, sigma)} omega02(., z(v)) / dv : series-valued
    // quadrature. The kernel in the first slot is evaluated at path nodes;
    // the second slot is the local series (x(v), Y(v)).
    Series<F> Cser = Series<F>::o(W - 2);
    {
      // precompute second-slot series pieces
      Series<F> invY2 = Yser.inverse();
      const Poly<Rat>& Nr = c_.N_rat();
      int g = c_.genus();
      auto second_slot = [&](const F& x1, const F& Y1) {
        // omega02(w, z)/ (dx1 dv) as a series in v
        // = [1/2 + P(x1, x(v))/(2 Y1 Y(v))] x'(v) / (x1 - x(v))^2 + corrections
        Series<F> P2 = Series<F>::zero(W + 4);
        {
          Series<F> x2pow = Series<F>::one(W + 4);
          F x1pow(1);
          for (int kk = 0; 2 * kk <= Nr.degree(); ++kk) {
            Rat n2k = Nr.coeff(2 * kk);
            Rat n2k1 = 2 * kk + 1 <= Nr.degree() ? Nr.coeff(2 * kk + 1) : Rat(0);
            Series<F> term = from_rat<F>(n2k) * Series<F>::one(W + 4);
            term += from_rat<F>(n2k1 / 2) * (Series<F>::constant(x1, W + 4) + xser);
            P2 += x1pow * (x2pow * term);
            x1pow *= x1;
            x2pow = (x2pow * xser).truncated(W + 4);
          }
        }
        Series<F> denom = Series<F>::constant(x1, W + 4) - xser;
        Series<F> dinv = denom.inverse();
        Series<F> bracket = from_rat<F>(Rat(1, 2)) * Series<F>::one(W + 4) +
                            (from_rat<F>(Rat(1, 2)) / Y1) * (P2 * invY2);
        Series<F> acc = ((bracket * dinv) * dinv) * dx;
        // corrections sum c_{jl} v_j(w) v_l(z)
        const auto& cm = b_.corrections();
        if (!cm.empty()) {
          F xm(1);
          for (int mj = 1; mj <= g; ++mj) {
            Series<F> xl = Series<F>::one(W + 4);
            for (int ml = 1; ml <= g; ++ml) {
              F cc = cm[static_cast<size_t>(mj - 1)][static_cast<size_t>(ml - 1)];
              if (!is_zero_v(cc))
                acc += ((cc * xm / Y1) * (xl * invY2)) * dx;
              xl = (xl * xser).truncated(W + 4);
            }
            xm *= x1;
          }
        }
        return acc.truncated(W - 2);
      };
      // quadrature along a_i -> (xref, sigma sheet): tau-substitution path
      F prev_norm = 0;
      Series<F> prev = Series<F>::o(W - 2);
      bool have = false;
      for (int n = 48; n <= 3072; n *= 2) {
        const auto& [xs, ws] = gl01_hp<typename field_traits<F>::real_type>(n);
        std::vector<size_t> order(xs.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t p, size_t q) { return xs[p] > xs[q]; });
        F yy = Yref_sigma;
        Series<F> acc = Series<F>::o(W - 2);
        for (size_t oi = 0; oi < order.size(); ++oi) {
          size_t i = order[oi];
          F tau = F(xs[i]);
          F x1 = ui + tau * tau * (xref - ui);
          F t = field_traits<F>::sqrt(c_.N().eval(x1));
          if (mag(F(t - yy)) > mag(F(-t - yy))) t = -t;
          yy = t;
          F dxdtau = F(2) * tau * (xref - ui);
          acc += (F(ws[i]) * dxdtau) * second_slot(x1, t);
        }
        if (have) {
          double diff = (acc - prev).max_mag();
          double scale = std::max(1.0, acc.max_mag());
          if (diff < 1e-18 * scale) {
            Cser = acc;
            break;
          }
        }
        prev = acc;
        prev_norm = prev.max_mag();
        have = true;
        check(n < 3072, errc::quadrature_non_convergent, "S0 quadrature did not stabilize");
      }
      (void)prev_norm;
    }

    // local tail: int_{(xref,sigma)}^{sigma z} omega02(., z) in chart series:
    // primitive in v' of Omega(v', v) rows, evaluated between vref and
    // v' = sigma(v) (= -v on sqrt charts / = v on the conjugate sheet).
    const auto& R = b_.rect(sigma_site, psite_);
    bool same_pt = b_.site(sigma_site).same_point(b_.site(psite_));
    Series<F> tail = Series<F>::o(W - 2);
    {
      // R-part primitive rows: sum_a R[a][b] v'^{a+1}/(a+1)
      // evaluated at v' = sigma(v): sqrt chart: (-v); conjugate sheet: v
      for (int a = 0; a < W; ++a) {
        Series<F> coeffs = Series<F>::o(W);
        bool nonzero = false;
        for (int b2 = 0; b2 < W; ++b2) {
          const F& rv = R[static_cast<size_t>(a)][static_cast<size_t>(b2)];
          if (!is_zero_v(rv)) {
            coeffs.set_coeff(b2, rv);
            nonzero = true;
          }
        }
        if (!nonzero) continue;
        // (sigma v)^{a+1} - vref^{a+1}, over (a+1)
        F sgn = sqrtc ? F((a + 1) % 2 == 0 ? 1 : -1) : F(1);
        Series<F> mono = Series<F>::monomial(sgn, a + 1, W);
        F ref_pow(1);
        for (int e = 0; e <= a; ++e) ref_pow *= vref;
        mono.set_coeff(0, mono.coeff(0) - ref_pow);
        tail += from_rat<F>(Rat(1, a + 1)) * (mono * coeffs);
      }
      // kernel part when sigma z lives on the same chart pair:
      // for the same-point pair (sqrt chart or same sheet), Omega includes
      // 1/(v'-v)^2, primitive -1/(v'-v): evaluate between vref and sigma(v)
      if (same_pt) {
        // at v' = sigma(v) = -v: -1/(-v - v) = 1/(2v)
        tail += Series<F>::monomial(from_rat<F>(Rat(1, 2)), -1, W - 2);
        // at v' = vref: +1/(vref - v) (minus the lower limit)
        Series<F> dref = Series<F>::constant(vref, W) - Series<F>::monomial(F(1), 1, W);
        tail -= dref.inverse();
      }
    }

    // assemble: S0'(v) = -[C + tail] + (1/2) x'(v)/(u_i - x(v))
    Series<F> last = (from_rat<F>(Rat(1, 2)) * dx) *
                     (Series<F>::constant(ui, W + 4) - xser).inverse();
    return (F(-1) * (Cser + tail) + last).truncated(W - 4);
  }
}

template <class F>
Series<F> WaveData<F>::compute_dS_dT(int k, TimeId id) {
  int W = b_.window();
  if (k == -1) {
    // dS_{-1}/dT: primitive of d omega01/dT at this pole; the constant is
    // the odd-primitive value at a reference point minus the local series
    Series<F> dser = var_.dT_omega01_at(id, psite_);
    check(dser.valuation() > -1 || is_zero_v(dser.coeff(-1)), errc::internal,
          "unexpected residue in d omega01/dT");
    Series<F> prim = dser.integrated().truncated(W - 4);
    F xref;
    if constexpr (field_traits<F>::is_exact) {
      // reference points with rational z = sqrt(x - u) (and rational
      // sqrt(x) at b_inf): x = ((t + u/t)/2)^2 has x - u = ((t - u/t)/2)^2
      F u = c_.ram(0).u;
      if (pole_.nu >= 0) {
        // want (X - u) + delta a perfect square with small rational delta
        F target = c_.pole_x(pole_.nu) - u;
        double st = std::sqrt(std::max(1e-30, mag(target)));
        long den = 1 << 14;
        Rat sr(static_cast<long>(st * den + 0.5), den);
        F ssq = from_rat<F>(sr * sr);
        xref = c_.pole_x(pole_.nu) + (ssq - target);
      } else {
        long t = static_cast<long>(2 * mag(c_.base_point())) + 5;
        F a = (F(t) + u / F(t)) / F(2);
        xref = a * a;
      }
    } else {
      if (pole_.nu >= 0) xref = c_.pole_x(pole_.nu) + from_rat<F>(Rat(1, 50));
      else xref = c_.base_point() * F(3);
    }
    F constant(0);
    {
      F y = [&] {
        if constexpr (field_traits<F>::is_exact) {
          // principal sheet: Y = c1 z, z = +sqrt(x - u)
          F u = c_.ram(0).u;
          F z = field_traits<F>::sqrt(F(xref - u));
          F Y = c_.ram(0).Y.coeff(1) * z;
          return (pole_.sheet == 1) ? F(-Y) : Y;
        } else {
          F yy = c_.y_principal(xref);
          if (pole_.sheet == 1) yy = -yy;
          return F(yy * c_.D().eval(xref));
        }
      }();
      F val = var_.dT_F01_value(id, route_branch_, xref, y);
      F v = chart_v(xref);
      constant = val - prim.eval(v);
    }
    prim.set_coeff(0, prim.coeff(0) + constant);
    return prim;
  }
  if (k == 0) {
    // dS_0/dT = (1/2) d[F02(z,z)]/dT = (1/2) * diagonal F-integral of the
    // dT-contraction of omega_{0,3} (the log counterterm is T-independent)
    Correlator<F> d = var_.d_dT(0, 2, id);
    return (from_rat<F>(Rat(1, 2)) * diag_from_tensor(d)).truncated(W - 4);
  }
  Series<F> acc = Series<F>::o(W - 2);
  for (int h = 0;; ++h) {
    int n = k + 2 - 2 * h;
    if (n < 1) break;
    if (2 * h - 2 + n < 1) continue;
    Rat fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    Correlator<F> d = var_.d_dT(h, n, id);
    acc += from_rat<F>(1 / fact) * diag_from_tensor(d);
  }
  return acc.truncated(W - 4);
}

// F_{0,2}(z1, z2) by the two-branch-point regularization (float mode,
// pointwise): -int_{a_i}^{sigma z1} int_{a_j}^{z2} omega02 - (1/2) log of the
// algebraic factor.
template <class F>
F f02_value(const CurveGeometry<F>& c, const Bergman<F>& b, int ai, int aj, const F& x1,
            const F& Y1, const F& x2, const F& Y2, double tol = 1e-20) {
  check(ai != aj, errc::coincident_branch_points, "F02 regularization needs distinct branch points");
  F ui = c.ram(ai).u, uj = c.ram(aj).u;
  // inner integral as a function of the first slot w: I(w) = int_{a_j}^{z2}
  // omega02(w, .); then outer int_{a_i}^{sigma z1} I(w) dw.
  auto inner = [&](const F& xw, const F& Yw) {
    auto form = [&](const F& xt, const F& Yt) { return b.full_kernel_eval(xw, Yw, xt, Yt); };
    return branch_to_point_integral<F>(c, uj, x2, Y2, form, tol);
  };
  F outer = branch_to_point_integral<F>(c, ui, x1, F(-Y1), inner, std::sqrt(tol) * 1e-2);
  F alg = (ui - x2) * (x1 - uj) / (ui - uj);
  return -outer - log(alg) / F(2);
}

}  // namespace trq

#endif
