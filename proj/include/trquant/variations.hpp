#ifndef TRQUANT_VARIATIONS_HPP
#define TRQUANT_VARIATIONS_HPP

// Variational formulas: time derivatives by residues at the poles, period
// derivatives by B-cycle quadrature, and the decomposition of f_phi in terms
// of times and free-energy derivatives.

#include "trquant/recursion.hpp"

namespace trq {

template <class F>
class Variations {
 public:
  Variations(TREngine<F>& tr, const MarkedCurve<F>* mc) : tr_(tr), c_(tr.curve()), b_(tr.bergman()), mc_(mc) {}

  // ---- residue weights against the eta basis --------------------------

  // w_{p,k}(a) with d/dT_{p,k} omega_{h,n} = contraction of omega_{h,n+1}
  // against w in one slot (Lemma 3.5 residue forms, k >= 2; k = 1 at finite
  // poles uses the regularized integral form).
  F time_weight(TimeId id, const EtaIdx& a) {
    auto key = std::make_pair(id, a);
    auto it = wT_.find(key);
    if (it != wT_.end()) return it->second;
    F w = compute_time_weight(id, a);
    wT_.emplace(key, w);
    return w;
  }

  // (1/2pi i) oint_{B_j} eta_a  (Lemma 3.5 epsilon convention)
  F eps_weight(int j, const EtaIdx& a) {
    if constexpr (field_traits<F>::is_exact) {
      fail(errc::missing_epsilon_derivative, "no periods at genus 0 (exact mode)");
    } else {
      auto key = std::make_pair(j, a);
      auto it = wE_.find(key);
      if (it != wE_.end()) return it->second;
      check(mc_ != nullptr, errc::missing_epsilon_derivative, "period derivatives need a marking");
      auto form = [&](const F& x, const F& Y) { return b_.eta_eval(a.i, a.k, x, Y); };
      F period = mc_->cycle_integral(mc_->b_cycle(j), form, 1e-22);
      F w = period / two_pi_i<F>();
      wE_.emplace(key, w);
      return w;
    }
  }
  // oint_{B_j} eta_a (theta-normalized epsilon derivative)
  F eps_weight_theta(int j, const EtaIdx& a) { return eps_weight(j, a) * two_pi_i<F>(); }

  // ---- derivatives of correlators --------------------------------------

  // contraction of one slot: returns the tensor of d omega_{h,n} / dT.
  Correlator<F> d_dT(int h, int n, TimeId id) {
    require_time(id);
    const auto& up = tr_.omega(h, n + 1);
    return contract_one(up, [&](const EtaIdx& a) { return time_weight(id, a); }, h, n);
  }
  Correlator<F> d_deps(int h, int n, int j) {
    check(c_.genus() >= 1, errc::missing_epsilon_derivative, "no periods at genus 0");
    const auto& up = tr_.omega(h, n + 1);
    return contract_one(up, [&](const EtaIdx& a) { return eps_weight(j, a); }, h, n);
  }

  // free-energy derivatives: dF_{h,0}/dT_{p,k} for h >= 1
  F d_dT_free_energy(int h, TimeId id) {
    require_time(id);
    check(h >= 1, errc::missing_derivative, "h >= 1 free-energy time derivatives only");
    const auto& w = tr_.omega(h, 1);
    F acc(0);
    for (const auto& [m, v] : w.c) acc += v * time_weight(id, m[0]);
    return acc;
  }
  // dF_{0,0}/dT_{p,k}: Lemma 3.5 applied to omega_{0,1} directly
  F d_dT_F00(TimeId id) {
    require_time(id);
    check(!(id.p >= 0 && id.k == 1), errc::unknown_time,
          "dF00/dT_{nu,1} requires the regularized integral form, not used downstream");
    F acc(0);
    for (const auto& rp : residue_template(id)) {
      const auto& pc = c_.pole_chart(rp.pt);
      int we;
      if (rp.pt.nu < 0) we = (c_.n_inf() == 0) ? -(id.k - 1) : -(2 * id.k - 3);
      else we = 1 - id.k;
      Series<F> dxdv = chart_dx_series<F>(pc.chart, pc.y.order() + 4);
      Series<F> form = pc.y * dxdv;
      acc += rp.coef * form.coeff(-1 - we);
    }
    return acc;
  }
  // d^2 F_{0,0}/dT dT': residues of the dT'-derivative of omega_{0,1}
  F d2_dTdT_F00(TimeId id1, TimeId id2) {
    require_time(id1);
    require_time(id2);
    // d omega01/dT2 expanded at the poles entering id1's residue
    F acc(0);
    for (const auto& [pt, weight_fn] : residue_points(id1)) {
      Series<F> dy = dT_omega01_at(id2, b_.site_of_pole(pt));
      acc += weight_fn(dy);
    }
    return acc;
  }
  // dF_{0,0}/d eps_j = (1/2pi i) oint_B omega01 ; d^2 via u-forms
  F phi_eps(int j) {
    if constexpr (field_traits<F>::is_exact) {
      fail(errc::missing_epsilon_derivative, "no periods at genus 0 (exact mode)");
    } else {
      check(mc_ != nullptr, errc::missing_epsilon_derivative, "needs marking");
      auto form = [&](const F& x, const F& Y) { return Y / c_.D().eval(x); };
      return mc_->cycle_integral(mc_->b_cycle(j), form, 1e-24) / two_pi_i<F>();
    }
  }
  // tau^{theta}_{jl} = (1/2pi i) oint_{B_j} u_l  (equals the period matrix)
  std::vector<std::vector<F>> tau_theta() {
    if constexpr (field_traits<F>::is_exact) {
      fail(errc::missing_epsilon_derivative, "no periods at genus 0 (exact mode)");
    } else {
      check(mc_ != nullptr, errc::missing_epsilon_derivative, "needs marking");
      return mc_->period_matrix(1e-24);
    }
  }
  // d^2 F00 / d eps_j d eps_l in the Lemma 3.5 normalization
  F d2_deps_F00(int j, int l) {
    auto tau = tau_theta();
    return tau[static_cast<size_t>(j)][static_cast<size_t>(l)] / two_pi_i<F>();
  }

  // d omega01/dT as a local series (ds-coefficient) at any chart site
  Series<F> dT_omega01_at(TimeId id, int target_site) {
    auto pts = residue_template(id);
    Series<F> acc = Series<F>::o(b_.window());
    for (const auto& [pt, kk, coef] : pts) {
      int psite = b_.site_of_pole(pt);
      // Res_{z' -> pt} [ omega02(z', z) * weightmono(x') ]: rows of the pair
      // (psite, target) give omega02(v', v) with |v'| << |v|;
      // the weight x'(v')^{...} has a Laurent expansion in v'.
      acc += coef * kernel_residue(psite, target_site, kk);
    }
    return acc;
  }

  F ieta_constant_public(const EtaIdx& a, PolePoint pt) { return ieta_constant(a, pt); }

  // d omega01/dT = (G(x)/Y) dx as an exact rational fit: the polynomial part
  // is read off at infinity, the principal parts at each finite pole, and the
  // remaining series coefficients verify the ansatz.
  RatFun<F> dT_omega01_G(TimeId id) {
    require_time(id);
    auto it = gfit_.find(id);
    if (it != gfit_.end()) return it->second;
    int inf_site = b_.site_of_pole(PolePoint{-1, 0});
    const auto& S = b_.site(inf_site);
    int W = b_.window();
    Series<F> dser = dT_omega01_at(id, inf_site);
    Series<F> G_inf = (dser * S.dx.truncated(W + 8).inverse() * S.Y.truncated(W + 8)).truncated(W - 4);
    int step = (S.chart.kind == ChartKind::inf_sqrt) ? 2 : 1;
    Poly<F> gpoly;
    for (int e = G_inf.valuation(); e <= 0; ++e) {
      F cv = G_inf.coeff(e);
      if (is_zero_v(cv)) continue;
      check(e % step == 0, errc::internal, "dT omega01 has a half-integer power at infinity");
      gpoly.set_coeff(-e / step, cv);
    }
    RatFun<F> G(gpoly);
    for (int nu = 0; nu < static_cast<int>(c_.divisor().finite.size()); ++nu) {
      int psite = b_.site_of_pole(PolePoint{nu, 0});
      const auto& PS = b_.site(psite);
      Series<F> dnu = dT_omega01_at(id, psite);
      Series<F> G_nu = (dnu * PS.dx.truncated(W + 8).inverse() * PS.Y.truncated(W + 8)).truncated(W - 4);
      Poly<F> den = Poly<F>::from_root(c_.pole_x(nu));
      for (int j = 1; j <= -G_nu.valuation(); ++j) {
        F cv = G_nu.coeff(-j);
        if (is_zero_v(cv)) continue;
        G += RatFun<F>(Poly<F>(cv), den.pow(j));
      }
    }
    {
      Series<F> fit = expand_at<F>(G, S.chart, W - 6, true).series;
      Series<F> diff = fit - G_inf;
      double scale = std::max(1.0, G_inf.max_mag());
      for (int e = diff.valuation(); e < std::min(diff.order(), W - 8); ++e)
        check(mag(diff.coeff(e)) <= (field_traits<F>::is_exact ? 0.0 : 1e-16 * scale),
              errc::internal, "dT omega01 rational fit fails consistency");
    }
    gfit_.emplace(id, G);
    return G;
  }

  // value of int_{a_route}^{(x0, sheet)} d omega01/dT (the odd primitive of
  // the fitted form: vanishes at every ramification point)
  F dT_F01_value(TimeId id, int route_branch, const F& x0, const F& Y0) {
    RatFun<F> G = dT_omega01_G(id);
    if constexpr (field_traits<F>::is_exact) {
      // global z = sqrt(x - u): form = R(z) dz, R(z) = 2 G(u + z^2)/c1,
      // even rational with residue-free poles at the pole preimages; exact
      // primitive by principal-part subtraction.
      F u = c_.ram(0).u;
      F c1 = c_.ram(0).Y.coeff(1);
      // R(z): substitute x = u + z^2 into G
      Poly<F> zsq(std::vector<F>{u, F(0), F(1)});
      Poly<F> num = substitute(G.num(), zsq);
      Poly<F> den = substitute(G.den(), zsq);
      RatFun<F> R = (F(2) / c1) * RatFun<F>(num, den);
      // exact odd primitive of R dz evaluated at z0 = sqrt(x0 - u) with the
      // sheet matching Y0 = c1 z0
      F z0 = field_traits<F>::sqrt(F(x0 - u));
      if (mag(F(c1 * z0 - Y0)) > mag(F(c1 * z0 + Y0))) z0 = -z0;
      return rational_primitive_value(R, z0);
    } else {
      auto form = [&](const F& x, const F& Y) { return G.eval(x) / Y; };
      F Yref = Y0;
      return branch_to_point_integral<F>(c_, c_.ram(route_branch).u, x0, Yref, form, 1e-24);
    }
  }

  // ---- Lemma 3.7 decomposition ------------------------------------------

  // U_{inf,k}(x) and U_{nu,k}(x) of Lemma 3.7 (rational functions of x)
  RatFun<F> U_inf(int k) const {
    // K_inf = [2, r_inf - 2]
    Poly<F> num;
    for (int l = k + 2; l <= c_.divisor().r_inf; ++l) {
      F t = const_cast<CurveGeometry<F>&>(c_).time_value(TimeId{-1, l});
      num.set_coeff(l - k - 2, num.coeff(l - k - 2) + t);
    }
    F w = (c_.n_inf() == 0) ? from_rat<F>(Rat(k - 1)) : from_rat<F>(Rat(2 * k - 3, 2));
    return RatFun<F>(w * num);
  }
  RatFun<F> U_nu(int nu, int k) const {
    // K_nu = [2, r_nu + 1]; U = (k-1) sum_{l=k-1}^{r} T_{nu,l} (x-X)^{k-l-2}
    F X = c_.pole_x(nu);
    RatFun<F> acc;
    for (int l = std::max(1, k - 1); l <= c_.divisor().finite[static_cast<size_t>(nu)].r; ++l) {
      F t = const_cast<CurveGeometry<F>&>(c_).time_value(TimeId{nu, l});
      int e = k - l - 2;  // <= -1 here
      Poly<F> den = Poly<F>::from_root(X).pow(-e);
      acc += RatFun<F>(Poly<F>(t), den);
    }
    return from_rat<F>(Rat(k - 1)) * acc;
  }

  // reconstruct f_phi from times and dF00/dT values (Lemma 3.7, both
  // parities); the caller compares against the input f.
  RatFun<F> lemma37_reconstruction() {
    auto& cc = const_cast<CurveGeometry<F>&>(c_);
    RatFun<F> acc;
    int rinf = c_.divisor().r_inf;
    // [template^2]_{inf,+}: powers >= 0 of the square of the singular part
    if (c_.n_inf() == 0) {
      Poly<F> pos;
      for (int k = 1; k <= rinf; ++k)
        for (int l = 1; l <= rinf; ++l) {
          int e = k + l - 4;
          if (e < 0) continue;
          pos.set_coeff(e, pos.coeff(e) + cc.time_value(TimeId{-1, k}) * cc.time_value(TimeId{-1, l}));
        }
      acc += RatFun<F>(pos);
    } else {
      Poly<F> pos;
      for (int k = 2; k <= rinf; ++k)
        for (int l = 2; l <= rinf; ++l) {
          int e = k + l - 5;
          if (e < 0) continue;
          pos.set_coeff(e, pos.coeff(e) + from_rat<F>(Rat(1, 4)) * cc.time_value(TimeId{-1, k}) *
                                              cc.time_value(TimeId{-1, l}));
        }
      acc += RatFun<F>(pos);
    }
    // finite poles: full negative part of the squared singular template
    for (int nu = 0; nu < static_cast<int>(c_.divisor().finite.size()); ++nu) {
      int r = c_.divisor().finite[static_cast<size_t>(nu)].r;
      F X = c_.pole_x(nu);
      for (int k = 1; k <= r; ++k)
        for (int l = 1; l <= r; ++l) {
          Poly<F> den = Poly<F>::from_root(X).pow(k + l);
          acc += RatFun<F>(Poly<F>(F(cc.time_value(TimeId{nu, k}) * cc.time_value(TimeId{nu, l}))), den);
        }
    }
    // U-terms
    for (int k = 2; k <= rinf - 2; ++k) acc += U_inf(k) * RatFun<F>(Poly<F>(d_dT_F00(TimeId{-1, k})));
    for (int nu = 0; nu < static_cast<int>(c_.divisor().finite.size()); ++nu) {
      int r = c_.divisor().finite[static_cast<size_t>(nu)].r;
      for (int k = 2; k <= r + 1; ++k)
        acc += U_nu(nu, k) * RatFun<F>(Poly<F>(d_dT_F00(TimeId{nu, k})));
    }
    return acc;
  }

 private:
  void require_time(TimeId id) {
    // k may exceed the declared r_p (deformations in an enlarged moduli
    // space); the pole itself must exist in the divisor
    bool pole_ok = id.p < 0 || (id.p >= 0 && id.p < static_cast<int>(c_.divisor().finite.size()));
    int kmin = (id.p < 0 && c_.n_inf() == 1) ? 2 : 1;
    check(pole_ok && id.k >= kmin, errc::unknown_time,
          "time not present in the declared divisor: " + id.str());
  }

  template <class WFn>
  Correlator<F> contract_one(const Correlator<F>& up, WFn&& wfn, int h, int n) {
    Correlator<F> out;
    out.h = h;
    out.n = n;
    for (const auto& [m, v] : up.c) {
      // contract each distinct value once (slot values, not positions)
      for (size_t pos = 0; pos < m.size(); ++pos) {
        if (pos > 0 && m[pos] == m[pos - 1]) continue;
        F w = wfn(m[pos]);
        if (is_zero_v(w)) continue;
        MultiIdx rest = without_position(m, pos);
        auto it = out.c.find(rest);
        if (it == out.c.end()) out.c.emplace(rest, v * w);
        else it->second += v * w;
      }
    }
    return out;
  }

  // template weights for the Lemma 3.5 residues: list of (pole point,
  // exponent parameter, prefactor)
  struct ResPt {
    PolePoint pt;
    int kk;
    F coef;
  };
  std::vector<ResPt> residue_template(TimeId id) {
    std::vector<ResPt> out;
    if (id.p < 0) {
      if (c_.n_inf() == 0) {
        out.push_back({PolePoint{-1, 0}, id.k, from_rat<F>(Rat(1, id.k - 1))});
        out.push_back({PolePoint{-1, 1}, id.k, from_rat<F>(Rat(-1, id.k - 1))});
      } else {
        out.push_back({PolePoint{-1, 0}, id.k, from_rat<F>(Rat(1, 2 * id.k - 3))});
      }
    } else {
      check(id.k >= 2, errc::unknown_time,
            "k = 1 residue form undefined; use the integral form");
      out.push_back({PolePoint{id.p, 0}, id.k, from_rat<F>(Rat(1, id.k - 1))});
      out.push_back({PolePoint{id.p, 1}, id.k, from_rat<F>(Rat(-1, id.k - 1))});
    }
    return out;
  }

  // weight monomial in the pole chart variable: x^{k-1} at infinity (n=0),
  // x^{k-3/2} at infinity (n=1), (x-X)^{-k+1} at finite poles
  int weight_exponent(PolePoint pt, int k) const {
    if (pt.nu < 0) return c_.n_inf() == 0 ? -(k - 1) : -(2 * k - 3);
    return k - 1;  // (x-X)^{1-k} = v^{1-k}: exponent -(k-1)... see below
  }

  F compute_time_weight(TimeId id, const EtaIdx& a) {
    if (id.p >= 0 && id.k == 1) {
      // regularized integral form; orientation fixed against the k >= 2
      // residue convention by the exact finite-difference oracle, giving
      // +2 Ieta_a(b_nu^+) (the odd primitive at the principal preimage)
      return from_rat<F>(Rat(2)) * ieta_constant(a, PolePoint{id.p, 0});
    }
    F acc(0);
    for (const auto& rp : residue_template(id)) {
      int psite = b_.site_of_pole(rp.pt);
      Series<F> L = b_.eta_at(psite, b_.site_of_ram(a.i), a.k);
      // residue of eta_a * weight at the pole: weight = v^{we} in chart var
      int we;
      if (rp.pt.nu < 0) we = (c_.n_inf() == 0) ? -(id.k - 1) : -(2 * id.k - 3);
      else we = 1 - id.k;
      // Res = coefficient of v^{-1 - we} of L
      acc += rp.coef * L.coeff(-1 - we);
    }
    return acc;
  }

  // Ieta_a evaluated at a pole point (the odd primitive's constant there)
  F ieta_constant(const EtaIdx& a, PolePoint pt) {
    auto key = std::make_pair(a, pt);
    auto it = ieta_const_.find(key);
    if (it != ieta_const_.end()) return it->second;
    F value;
    if constexpr (field_traits<F>::is_exact) {
      value = ieta_constant_exact(a, pt);
    } else {
      // numeric path integral from an anchor where the odd primitive
      // vanishes (any sigma-fixed point other than eta's own pole) to a
      // reference point near the target pole, then the local series tail
      F xref, Yref;
      reference_near_pole(pt, xref, Yref);
      auto form = [&](const F& x, const F& Y) { return b_.eta_eval(a.i, a.k, x, Y); };
      F path(0);
      int anchor = -1;
      for (int m = 0; m < c_.num_branch(); ++m)
        if (m != a.i) {
          anchor = m;
          break;
        }
      if (anchor >= 0) {
        path = branch_to_point_integral<F>(c_, c_.ram(anchor).u, xref, Yref, form, 1e-24);
      } else {
        check(c_.inf_ramified(), errc::internal, "no anchor ramification point available");
        path = integral_from_infinity(form, xref, Yref);
      }
      int psite = b_.site_of_pole(pt);
      Series<F> L = b_.eta_at(psite, b_.site_of_ram(a.i), a.k);
      Series<F> P = L.integrated();  // eta regular and residue-free at the pole
      F v = chart_value(b_.site(psite).chart, xref);
      value = path - P.eval(v);  // Ieta(pole) = Ieta(xref) + [P(0) - P(v)]
    }
    ieta_const_.emplace(key, value);
    return value;
  }

  F ieta_constant_exact(const EtaIdx& a, PolePoint pt);

  static Poly<F> substitute(const Poly<F>& p, const Poly<F>& arg) {
    Poly<F> acc;
    for (int e = p.degree(); e >= 0; --e) acc = acc * arg + Poly<F>(p.coeff(e));
    return acc;
  }

  // exact value at z0 of the primitive (vanishing at 0) of an even rational
  // function R with residue-free poles away from 0
  F rational_primitive_value(const RatFun<F>& R, const F& z0) {
    // poles of R: roots of den (rational points for the exact curves)
    Poly<F> den = R.den();
    RatFun<F> rest = R;
    F total(0);
    // extract principal parts at each distinct rational root of den
    Poly<F> d = den;
    std::vector<F> roots;
    // rational roots via the linear factors present in den: our exact pole
    // preimages are rational; detect by trial over candidate roots from the
    // curve data
    std::vector<F> cands;
    F u = c_.ram(0).u;
    for (int nu = 0; nu < static_cast<int>(c_.divisor().finite.size()); ++nu) {
      F zx = field_traits<F>::sqrt(F(c_.pole_x(nu) - u));
      cands.push_back(zx);
      cands.push_back(-zx);
    }
    for (const auto& r : cands) {
      // order of r as pole of R
      auto fs = expand_at<F>(R, Chart<F>{ChartKind::finite_reg, r}, 4 - 0 + 8);
      int ordp = -fs.series.valuation();
      if (ordp <= 0) continue;
      check(is_zero_v(fs.series.coeff(-1)), errc::internal, "unexpected residue in dT omega01");
      for (int j = 2; j <= ordp; ++j) {
        F cj = fs.series.coeff(-j);
        if (is_zero_v(cj)) continue;
        // primitive of cj/(z-r)^j: cj (z-r)^{1-j}/(1-j); value at z0 minus 0
        F at_z0(1), at_0(1);
        for (int e2 = 0; e2 < j - 1; ++e2) {
          at_z0 *= (z0 - r);
          at_0 *= (F(0) - r);
        }
        total += cj / from_rat<F>(Rat(1 - j)) * (F(1) / at_z0 - F(1) / at_0);
        // remove from rest
        Poly<F> dj = Poly<F>::from_root(r).pow(j);
        rest -= RatFun<F>(Poly<F>(cj), dj);
      }
    }
    check(rest.is_polynomial(), errc::internal, "dT omega01 primitive: nonpolynomial remainder");
    Poly<F> pp = rest.as_polynomial();
    // polynomial primitive value at z0 (vanishing at 0)
    F acc(0);
    F zp = z0;
    for (int e = 0; e <= pp.degree(); ++e) {
      acc += pp.coeff(e) * zp / from_rat<F>(Rat(e + 1));
      zp *= z0;
    }
    return total + acc;
  }

  // int_{b_inf}^{(xref,Yref)} of a 1-form f(x,Y)dx: continue along the real
  // axis to a large point, then the xi = x^{-1/2} chart tail to infinity
  // (n_inf = 1 curves; the integrand is regular at b_inf).
  F integral_from_infinity(const std::function<F(const F&, const F&)>& form, const F& xref,
                           const F& Yref) {
    if constexpr (field_traits<F>::is_exact) {
      fail(errc::internal, "numeric route only");
    } else {
      using RT = typename field_traits<F>::real_type;
      F xbig = c_.base_point() * F(16);
      F y = Yref;
      F seg = segment_integral<F>(c_, xref, xbig, y, form, 1e-22);
      F xibig = F(1) / field_traits<F>::sqrt(xbig);
      F prev(0);
      bool have = false;
      for (int n = 32; n <= 4096; n *= 2) {
        const auto& [xs, ws] = gl01_hp<RT>(n);
        std::vector<size_t> order(xs.size());
        for (size_t i2 = 0; i2 < order.size(); ++i2) order[i2] = i2;
        std::sort(order.begin(), order.end(), [&](size_t a2, size_t b2) { return xs[a2] > xs[b2]; });
        F acc(0);
        F ytail = y;
        std::vector<F> fvals(xs.size());
        for (size_t oi = 0; oi < order.size(); ++oi) {
          size_t i2 = order[oi];
          F xi = xibig * F(xs[i2]);
          F x = F(1) / (xi * xi);
          F t = field_traits<F>::sqrt(c_.N().eval(x));
          if (mag(F(t - ytail)) > mag(F(-t - ytail))) t = -t;
          ytail = t;
          F dxdxi = F(-2) / (xi * xi * xi);
          fvals[i2] = form(x, ytail) * dxdxi;
        }
        for (size_t i2 = 0; i2 < xs.size(); ++i2) acc += F(ws[i2]) * fvals[i2] * xibig;
        // acc = int_{xi=0}^{xibig} = int_{b_inf}^{xbig} in x
        if (have && mag(F(acc - prev)) < 1e-20 * std::max(1.0, mag(acc)))
          return acc - seg;  // Ieta(xref) = int_{b_inf}^{xbig} - int_{xref}^{xbig}
        prev = acc;
        have = true;
      }
      fail(errc::quadrature_non_convergent, "tail quadrature did not stabilize");
    }
  }

  void reference_near_pole(PolePoint pt, F& xref, F& Yref) {
    if (pt.nu >= 0) {
      F X = c_.pole_x(pt.nu);
      xref = X + from_rat<F>(Rat(1, 50));
    } else {
      xref = c_.base_point() * F(3);
    }
    F y = c_.y_principal(xref);
    // principal sheet is sheet 0
    if (pt.sheet == 1) y = -y;
    Yref = y * c_.D().eval(xref);
  }
  static F chart_value(const Chart<F>& ch, const F& x) {
    switch (ch.kind) {
      case ChartKind::finite_reg: return x - ch.center;
      case ChartKind::finite_sqrt: return field_traits<F>::sqrt(F(x - ch.center));
      case ChartKind::inf_reg: return F(1) / x;
      case ChartKind::inf_sqrt: return F(1) / field_traits<F>::sqrt(x);
    }
    return F(0);
  }

  // residue in the first slot of omega02 against a weight monomial, expanded
  // at a target site: Res_{v'} [ x'(v')-weight-series * Omega(v', v) dv' ]
  Series<F> kernel_residue(int psite, int target_site, int k_param) {
    // weight series in v' at psite
    const auto& P = b_.site(psite);
    int W = b_.window();
    int we;
    if (P.pole.nu < 0) we = (c_.n_inf() == 0) ? -(k_param - 1) : -(2 * k_param - 3);
    else we = 1 - k_param;
    // Omega(v', v): rows of pair (psite, target) with |v'| << |v|; we need the
    // residue in v', i.e. coefficient of v'^{-1}: rows indexed by v'-power.
    // rect stores the regular part: R[a][b] with first index = psite exponent.
    const auto& R = b_.rect(psite, target_site);
    Series<F> acc = Series<F>::o(W);
    int need = -1 - we;  // v'-exponent whose coefficient we take
    if (need >= 0 && need < static_cast<int>(R.size())) {
      for (int b2 = 0; b2 < static_cast<int>(R.size()); ++b2)
        acc.set_coeff(b2, R[static_cast<size_t>(need)][static_cast<size_t>(b2)]);
    }
    // same-point kernel part: only when the target chart IS the pole chart
    if (b_.site(psite).same_point(b_.site(target_site))) {
      // (v'-v)^{-2} with residue contour |v'| < |v|: sum (m+1) v'^m v^{-m-2}
      if (need >= 0) acc.set_coeff(-need - 2, acc.coeff(-need - 2) + from_rat<F>(Rat(need + 1)));
    }
    return acc;
  }

  TREngine<F>& tr_;
  const CurveGeometry<F>& c_;
  const Bergman<F>& b_;
  const MarkedCurve<F>* mc_;
  std::map<std::pair<TimeId, EtaIdx>, F> wT_;
  std::map<TimeId, RatFun<F>> gfit_;
  std::map<std::pair<int, EtaIdx>, F> wE_;
  std::map<std::pair<EtaIdx, PolePoint>, F> ieta_const_;

  std::vector<std::pair<PolePoint, std::function<F(const Series<F>&)>>> residue_points(TimeId id) {
    std::vector<std::pair<PolePoint, std::function<F(const Series<F>&)>>> out;
    for (const auto& rp : residue_template(id)) {
      int we;
      if (rp.pt.nu < 0) we = (c_.n_inf() == 0) ? -(id.k - 1) : -(2 * id.k - 3);
      else we = 1 - id.k;
      F coef = rp.coef;
      out.push_back({rp.pt, [coef, we](const Series<F>& dy) { return coef * dy.coeff(-1 - we); }});
    }
    return out;
  }
};

// Exact genus-0 Ieta constants. In exact mode the curve has a single finite
// branch point u (deg N = 1) and z = s is a global coordinate: eta is a
// Laurent polynomial E(z) dz with even exponents in [-2k-2, -2], so its odd
// primitive is a Laurent polynomial too, vanishing at z = infinity.
template <class F>
F Variations<F>::ieta_constant_exact(const EtaIdx& a, PolePoint pt) {
  check(c_.genus() == 0 && c_.n_inf() == 1, errc::internal,
        "exact Ieta constants require the global genus-0 coordinate");
  int site = b_.site_of_ram(a.i);
  Series<F> E = b_.eta_at(site, site, a.k);
  for (int e = -1; e < E.order(); ++e)
    check(is_zero_v(E.coeff(e)), errc::internal, "eta fails to terminate in the global coordinate");
  Series<F> I = E.integrated();
  if (pt.nu < 0) return F(0);  // Ieta vanishes at b_inf (only negative powers)
  // z-value above the pole on the requested sheet
  F u = c_.ram(a.i).u;
  F X = c_.pole_x(pt.nu);
  F z0 = field_traits<F>::sqrt(F(X - u));
  // sheet calibration in double precision (signs are discrete data):
  // global y(z) = c1 z / D(x) vs the pole-chart series on the wanted sheet
  double c1 = c_.ram(a.i).Y.coeff(1).template convert_to<double>();
  double xprobe = X.template convert_to<double>() + 1.0 / 64;
  double zprobe = std::sqrt(xprobe - u.template convert_to<double>());
  double dd = 1;
  for (const auto& p : c_.divisor().finite)
    for (int k = 0; k < p.r; ++k) dd *= (xprobe - p.X.template convert_to<double>());
  double y_glob = c1 * zprobe / dd;
  const auto& pc = c_.pole_chart(PolePoint{pt.nu, pt.sheet});
  double y_chart = 0, vp = 1, v0 = xprobe - X.template convert_to<double>();
  for (int e = 0; e < pc.y.order(); ++e) {
    if (e >= pc.y.valuation()) y_chart += pc.y.coeff(e).template convert_to<double>() * vp;
    vp *= v0;
  }
  for (int e = -1; e >= pc.y.valuation(); --e)
    y_chart += pc.y.coeff(e).template convert_to<double>() * std::pow(v0, e);
  if (std::abs(y_glob - y_chart) > std::abs(y_glob + y_chart)) z0 = -z0;
  return I.eval(z0);
}

}  // namespace trq

#endif
