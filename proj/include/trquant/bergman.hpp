#ifndef TRQUANT_BERGMAN_HPP
#define TRQUANT_BERGMAN_HPP

// The normalized bidifferential omega_{0,2}: explicit algebraic kernel on the
// hyper-elliptic model plus the g x g correction matrix killing A-periods,
// with double local expansions at all chart pairs (the raw material for the
// eta basis and the recursion).
//
// Algebraic part, with Y^2 = N(x) and P(x1,x2) the symmetric polynomial of
// bidegree <= g+1 with P(x,x) = N(x):
//   B_alg = [1 + P(x1,x2)/(Y1 Y2)] dx1 dx2 / (2 (x1-x2)^2)
// The diagonal double pole has unit coefficient in any chart, B_alg is
// regular at branch points, and B_alg(z1,z2) + B_alg(z1,sigma z2) is the
// pure double pole in x — so corrections live in spans of v_j v_l.

#include <optional>

#include "trquant/periods.hpp"

namespace trq {

// Chart registry entry: every ramification point and every pole sheet.
template <class F>
struct ChartSite {
  enum class Kind { ram, ram_inf, pole } kind;
  int ram_index = -1;      // for ram
  PolePoint pole{0, 0};    // for pole
  Chart<F> chart;
  Series<F> x;    // x(v)
  Series<F> dx;   // dx/dv
  Series<F> Y;    // polynomial-model branch value on this sheet
  bool same_point(const ChartSite& o) const {
    // with n_inf = 1 the infinite ramification point IS the infinite pole
    auto is_binf = [](const ChartSite& s) {
      return s.kind == Kind::ram_inf || (s.kind == Kind::pole && s.pole.nu == -1 && s.chart.kind == ChartKind::inf_sqrt);
    };
    if (is_binf(*this) && is_binf(o)) return true;
    if (kind != o.kind) return false;
    if (kind == Kind::ram) return ram_index == o.ram_index;
    if (kind == Kind::ram_inf) return true;
    return pole == o.pole;
  }
};

// Double Laurent data, |v| << |v'| ordering: sum_{a} v^{vlead+a} * row[a](v').
template <class F>
struct Rows {
  int vlead = 0;
  std::vector<Series<F>> r;

  static Rows zero(int vlead, int count, int ord) {
    Rows out;
    out.vlead = vlead;
    out.r.assign(static_cast<size_t>(count), Series<F>::o(ord));
    return out;
  }
};

template <class F>
class Bergman {
 public:
  Bergman(const CurveGeometry<F>& c, const MarkedCurve<F>* mc, int window)
      : c_(c), mc_(mc), W_(window) {
    build_sites();
    if constexpr (!field_traits<F>::is_exact) {
      if (c_.genus() > 0) solve_corrections();
    } else {
      check(c_.genus() == 0, errc::not_admissible, "exact mode supports genus 0 only");
    }
    build_rectangles();
  }

  const CurveGeometry<F>& curve() const { return c_; }
  int window() const { return W_; }
  int genus() const { return c_.genus(); }
  const std::vector<std::vector<F>>& corrections() const { return cmat_; }

  int num_sites() const { return static_cast<int>(sites_.size()); }
  const ChartSite<F>& site(int i) const { return sites_.at(static_cast<size_t>(i)); }
  int site_of_ram(int i) const { return ram_site_.at(static_cast<size_t>(i)); }
  int site_of_ram_inf() const {
    check(raminf_site_ >= 0, errc::internal, "no infinite ramification site");
    return raminf_site_;
  }
  int site_of_pole(PolePoint p) const {
    for (int i = 0; i < num_sites(); ++i)
      if (sites_[static_cast<size_t>(i)].kind == ChartSite<F>::Kind::pole && sites_[static_cast<size_t>(i)].pole == p)
        return i;
    fail(errc::internal, "pole site not found");
  }
  // every ramification site index (finite ones, then infinity if ramified)
  std::vector<int> ram_sites() const {
    std::vector<int> out = ram_site_;
    if (raminf_site_ >= 0) out.push_back(raminf_site_);
    return out;
  }

  // Regular part of omega_{0,2} in chart coordinates of (A,B): full kernel is
  // [1/(v-v')^2 if same point] + sum_{a,b} R[a][b] v^a v'^b.
  const std::vector<std::vector<F>>& rect(int A, int B) const {
    auto it = rect_.find({A, B});
    check(it != rect_.end(), errc::internal, "missing Bergman rectangle");
    return it->second;
  }

  // omega_{0,2}(z, sigma z) / (ds)^2 at ramification site A (even Laurent).
  // The diagonal-sum coefficient at s^e is complete for e <= W-1.
  Series<F> sigma_kernel(int A) const {
    const auto& R = rect(A, A);
    int n = static_cast<int>(R.size());
    Series<F> out = Series<F>::from_coeffs({}, -2, n);
    out.set_coeff(-2, from_rat<F>(Rat(-1, 4)));
    for (int a = 0; a < n; ++a)
      for (int b = 0; a + b < n; ++b) {
        if ((a + b) % 2 != 0) continue;
        F v = R[static_cast<size_t>(a)][static_cast<size_t>(b)];
        if (b % 2 == 1) v = -v;
        if (!is_zero_v(v)) out.set_coeff(a + b, out.coeff(a + b) - v);
      }
    return out;
  }

  // eta_{j,l} expanded at site A: coefficient series E with eta = E(v) dv.
  Series<F> eta_at(int A, int ramj_site, int l) const {
    const auto& R = rect(A, ramj_site);
    int n = static_cast<int>(R.size());
    Series<F> out = Series<F>::from_coeffs({}, -2 * l - 2, n);
    if (2 * l < n) {
      for (int a = 0; a < n; ++a) out.set_coeff(a, R[static_cast<size_t>(a)][static_cast<size_t>(2 * l)]);
    } else {
      fail(errc::order_budget_exceeded, "eta order exceeds Bergman window");
    }
    if (site(A).same_point(site(ramj_site)))
      out.set_coeff(-2 * l - 2, out.coeff(-2 * l - 2) + from_rat<F>(Rat(2 * l + 1)));
    return out;
  }

  // Numeric evaluation of eta_{j,l} = [ S_{jl}(x) / Y ] dx on the sheet
  // carrying the polynomial-model value Y = y * D(x). The residue of the
  // 1/2 dx dx'/(x-x')^2 part vanishes (odd integrand), so eta is pure 1/Y
  // type, manifestly sigma-odd. Float-mode quadrature helper.
  F eta_eval(int j, int l, const F& x, const F& Y) const {
    const auto& rc = c_.ram(j);
    F acc(0);
    // P-part: (1/Y) [s'^{2l}] P(x, u_j + s'^2) / ((Y_j(s')/s') (x-u_j-s'^2)^2)
    int n = 2 * l + 4;
    Series<F> s2 = Series<F>::monomial(F(1), 2, n);
    // P(x, u + s'^2) as series in s' (x is a number here)
    const Poly<Rat>& Nr = c_.N_rat();
    Series<F> Pser = Series<F>::zero(n);
    {
      Series<F> x2s = x2factor(rc.u, n);
      Series<F> x2pow = Series<F>::one(n);
      F x1pow(1);
      for (int k = 0; 2 * k <= Nr.degree(); ++k) {
        Rat n2k = Nr.coeff(2 * k);
        Rat n2k1 = 2 * k + 1 <= Nr.degree() ? Nr.coeff(2 * k + 1) : Rat(0);
        Series<F> term = from_rat<F>(n2k) * Series<F>::one(n);
        term += from_rat<F>(n2k1 / 2) * (Series<F>::constant(x, n) + x2s);
        Pser += x1pow * (x2pow * term);
        x1pow *= x;
        x2pow = x2pow * x2s;
      }
    }
    Series<F> yj_over_s = c_.ram(j).Y.shifted(-1).truncated(n);
    Series<F> denom = Series<F>::constant(x - rc.u, n) - s2;
    Series<F> expr = Pser * (yj_over_s * denom * denom).inverse();
    F p_part = expr.coeff(2 * l) / Y;
    acc += p_part;
    // correction part: sum_m [sum_l' c_{m l'} rho_{l', (j,l)}] x^{m-1}/Y
    if (!cmat_.empty()) {
      Series<F> two_over = (from_rat<F>(Rat(2)) * yj_over_s.inverse()).truncated(n);
      Series<F> x2s = x2factor(rc.u, n);
      Series<F> x2pow = Series<F>::one(n);
      for (int lp = 1; lp <= genus(); ++lp) {
        if (lp > 1) x2pow = x2pow * x2s;
        F rho = (x2pow * two_over).coeff(2 * l);
        F xm(1);
        for (int m = 1; m <= genus(); ++m) {
          acc += cmat_[static_cast<size_t>(m - 1)][static_cast<size_t>(lp - 1)] * rho * xm / Y;
          xm *= x;
        }
      }
    }
    return acc;
  }

  // B_alg(z1, z2) evaluated numerically in the first slot (for quadrature):
  // value of the dx1-coefficient at (x1, Y1), second point fixed.
  F alg_kernel_eval(const F& x1, const F& Y1, const F& x2, const F& Y2) const {
    F P = P_eval(x1, x2);
    F d = x1 - x2;
    return (F(1) + P / (Y1 * Y2)) / (F(2) * d * d);
  }
  F full_kernel_eval(const F& x1, const F& Y1, const F& x2, const F& Y2) const {
    F acc = alg_kernel_eval(x1, Y1, x2, Y2);
    if (!cmat_.empty()) {
      F xm(1);
      for (int m = 1; m <= genus(); ++m) {
        F xl(1);
        for (int l = 1; l <= genus(); ++l) {
          acc += cmat_[static_cast<size_t>(m - 1)][static_cast<size_t>(l - 1)] * xm * xl / (Y1 * Y2);
          xl *= x2;
        }
        xm *= x1;
      }
    }
    return acc;
  }

  F P_eval(const F& x1, const F& x2) const {
    const Poly<Rat>& Nr = c_.N_rat();
    F acc(0);
    F p1(1), p2(1);
    for (int k = 0; 2 * k <= Nr.degree(); ++k) {
      F term = from_rat<F>(Nr.coeff(2 * k));
      if (2 * k + 1 <= Nr.degree()) term += from_rat<F>(Nr.coeff(2 * k + 1) / 2) * (x1 + x2);
      acc += p1 * p2 * term;
      p1 *= x1;
      p2 *= x2;
    }
    return acc;
  }

 private:
  static void break_guard(int) {}
  static Series<F> x2factor(const F& u, int n) {
    auto s = Series<F>::monomial(F(1), 2, n);
    s.set_coeff(0, u);
    return s;
  }

  void build_sites();
  void solve_corrections();
  void build_rectangles();
  Rows<F> assemble_pair(int A, int B) const;

  const CurveGeometry<F>& c_;
  const MarkedCurve<F>* mc_;
  int W_;
  std::vector<ChartSite<F>> sites_;
  std::vector<int> ram_site_;
  int raminf_site_ = -1;
  std::vector<std::vector<F>> cmat_;
  std::map<std::pair<int, int>, std::vector<std::vector<F>>> rect_;
};

template <class F>
void Bergman<F>::build_sites() {
  // depth beyond both the output window and the division losses
  int guard = 4 * W_ + 40 + 2 * (c_.N_rat().degree() + 4);
  // rebuild branch series at guard depth, signs matched to the curve's
  // calibrated charts
  auto signed_sqrt = [&](const Chart<F>& ch, const Series<F>& reference) {
    Series<F> Nser = detail::poly_in_chart<F>(c_.N(), ch, guard);
    Series<F> Yser = Nser.sqrt();
    int v = reference.valuation();
    F ratio = reference.coeff(v) / Yser.coeff(v);
    if (mag(F(ratio - F(1))) > mag(F(ratio + F(1)))) Yser = -Yser;
    return Yser;
  };
  auto add = [&](ChartSite<F> cs) {
    cs.x = chart_x_series<F>(cs.chart, guard);
    cs.dx = chart_dx_series<F>(cs.chart, guard);
    sites_.push_back(std::move(cs));
  };
  for (int i = 0; i < c_.num_branch(); ++i) {
    ChartSite<F> cs;
    cs.kind = ChartSite<F>::Kind::ram;
    cs.ram_index = i;
    cs.chart = c_.ram(i).chart;
    cs.Y = signed_sqrt(cs.chart, c_.ram(i).Y);
    ram_site_.push_back(static_cast<int>(sites_.size()));
    add(std::move(cs));
  }
  if (c_.inf_ramified()) {
    ChartSite<F> cs;
    cs.kind = ChartSite<F>::Kind::ram_inf;
    cs.chart = c_.ram_inf().chart;
    cs.Y = signed_sqrt(cs.chart, c_.ram_inf().Y);
    raminf_site_ = static_cast<int>(sites_.size());
    add(std::move(cs));
  }
  for (const auto& pc : c_.pole_charts()) {
    ChartSite<F> cs;
    cs.kind = ChartSite<F>::Kind::pole;
    cs.pole = pc.id;
    cs.chart = pc.chart;
    Series<F> Dser = detail::poly_in_chart<F>(c_.D(), pc.chart, guard);
    Series<F> yref = pc.y;
    cs.Y = signed_sqrt(cs.chart, (yref * Dser).truncated(pc.y.order()));
    add(std::move(cs));
  }
}

template <class F>
void Bergman<F>::solve_corrections() {
  if constexpr (field_traits<F>::is_exact) {
    fail(errc::internal, "corrections are a float-mode computation");
  } else {
  check(mc_ != nullptr, errc::config_error, "genus >= 1 needs a marked curve for A-periods");
  int g = genus();
  // sample points z2 on the principal sheet, away from everything
  std::vector<F> xs;
  double reach = mag(c_.base_point());
  for (int k = 0; k < g; ++k)
    xs.push_back(c_.base_point() + from_rat<F>(Rat(3 + 2 * k, 7)) +
                 imag_unit<field_traits<F>::precision_bits>() * from_rat<F>(Rat(2 + k, 5)));
  (void)reach;
  // d_{m,l}: oint_{A_m} B_alg(., z2) dx1 = sum_l d_{m l} v_l(z2)
  std::vector<std::vector<F>> dmat(static_cast<size_t>(g), std::vector<F>(static_cast<size_t>(g), F(0)));
  std::vector<std::vector<F>> vvals(static_cast<size_t>(g), std::vector<F>(static_cast<size_t>(g), F(0)));
  std::vector<std::vector<F>> lhs(static_cast<size_t>(g), std::vector<F>(static_cast<size_t>(g), F(0)));
  for (int s = 0; s < g; ++s) {
    F x2 = xs[static_cast<size_t>(s)];
    F y2 = c_.y_principal(x2);
    F Y2 = y2 * c_.D().eval(x2);
    for (int m = 0; m < g; ++m) {
      auto integrand = [&](const F& x1, const F& Y1) { return alg_kernel_eval(x1, Y1, x2, Y2); };
      lhs[static_cast<size_t>(m)][static_cast<size_t>(s)] =
          mc_->cycle_integral(mc_->a_cycle(m), integrand, 1e-24);
    }
    F xp(1);
    for (int l = 0; l < g; ++l) {
      vvals[static_cast<size_t>(l)][static_cast<size_t>(s)] = xp / Y2;
      xp *= x2;
    }
  }
  // solve d * v = lhs (g x g against sample columns)
  // d = lhs * v^{-1}
  // reuse the small Gaussian solver from MarkedCurve via local lambda
  auto invert = [&](std::vector<std::vector<F>> M) {
    int n = static_cast<int>(M.size());
    std::vector<std::vector<F>> I(static_cast<size_t>(n), std::vector<F>(static_cast<size_t>(n), F(0)));
    for (int i = 0; i < n; ++i) I[static_cast<size_t>(i)][static_cast<size_t>(i)] = F(1);
    for (int col = 0; col < n; ++col) {
      int piv = col;
      double best = 0;
      for (int r = col; r < n; ++r) {
        double m = mag(M[static_cast<size_t>(r)][static_cast<size_t>(col)]);
        if (m > best) best = m, piv = r;
      }
      check(best > 0, errc::singular_period_matrix, "singular sample matrix");
      std::swap(M[static_cast<size_t>(piv)], M[static_cast<size_t>(col)]);
      std::swap(I[static_cast<size_t>(piv)], I[static_cast<size_t>(col)]);
      F d = M[static_cast<size_t>(col)][static_cast<size_t>(col)];
      for (int c2 = 0; c2 < n; ++c2) M[static_cast<size_t>(col)][static_cast<size_t>(c2)] /= d, I[static_cast<size_t>(col)][static_cast<size_t>(c2)] /= d;
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        F f = M[static_cast<size_t>(r)][static_cast<size_t>(col)];
        if (is_zero_v(f)) continue;
        for (int c2 = 0; c2 < n; ++c2) {
          M[static_cast<size_t>(r)][static_cast<size_t>(c2)] -= f * M[static_cast<size_t>(col)][static_cast<size_t>(c2)];
          I[static_cast<size_t>(r)][static_cast<size_t>(c2)] -= f * I[static_cast<size_t>(col)][static_cast<size_t>(c2)];
        }
      }
    }
    return I;
  };
  auto vinv = invert(vvals);
  for (int m = 0; m < g; ++m)
    for (int l = 0; l < g; ++l) {
      F acc(0);
      for (int s = 0; s < g; ++s)
        acc += lhs[static_cast<size_t>(m)][static_cast<size_t>(s)] * vinv[static_cast<size_t>(s)][static_cast<size_t>(l)];
      dmat[static_cast<size_t>(m)][static_cast<size_t>(l)] = acc;
    }
  // A-period matrix of the v_j and final correction: A c = -d
  std::vector<std::vector<F>> A, B;
  mc_->holomorphic_periods(A, B, 1e-24);
  auto Ainv = invert(A);
  cmat_.assign(static_cast<size_t>(g), std::vector<F>(static_cast<size_t>(g), F(0)));
  for (int j = 0; j < g; ++j)
    for (int l = 0; l < g; ++l) {
      F acc(0);
      for (int m = 0; m < g; ++m)
        acc -= Ainv[static_cast<size_t>(j)][static_cast<size_t>(m)] * dmat[static_cast<size_t>(m)][static_cast<size_t>(l)];
      cmat_[static_cast<size_t>(j)][static_cast<size_t>(l)] = acc;
    }
  }
}

template <class F>
Rows<F> Bergman<F>::assemble_pair(int A, int B) const {
  const auto& SA = sites_[static_cast<size_t>(A)];
  const auto& SB = sites_[static_cast<size_t>(B)];
  int W = W_;
  int whi = 3 * W + 24;  // division against same-point denominators eats order per row
  int rows = W + 4;

  // separable numerator terms: M = sum_t L_t(v) x R_t(v')
  std::vector<std::pair<Series<F>, Series<F>>> terms;
  int guard = 2 * W + 2 * (c_.N_rat().degree() + 4);
  Series<F> dxA = SA.dx.truncated(guard), dxB = SB.dx.truncated(guard);
  terms.push_back({from_rat<F>(Rat(1, 2)) * dxA, dxB});
  // P-part: (1/2) (P_t^L dxA / Y_A) x (P_t^R dxB / Y_B)
  Series<F> invYA = SA.Y.truncated(guard).inverse();
  Series<F> invYB = SB.Y.truncated(guard).inverse();
  const Poly<Rat>& Nr = c_.N_rat();
  std::vector<Series<F>> xpowA{Series<F>::one(guard)}, xpowB{Series<F>::one(guard)};
  for (int k = 1; k <= Nr.degree() / 2 + 1; ++k) {
    xpowA.push_back((xpowA.back() * SA.x).truncated(guard));
    xpowB.push_back((xpowB.back() * SB.x).truncated(guard));
  }
  auto addP = [&](const Rat& coef, int ea, int eb) {
    if (coef == 0) return;
    terms.push_back({from_rat<F>(coef / 2) * (xpowA[static_cast<size_t>(ea)] * dxA * invYA),
                     xpowB[static_cast<size_t>(eb)] * dxB * invYB});
  };
  for (int k = 0; 2 * k <= Nr.degree(); ++k) {
    addP(Nr.coeff(2 * k), k, k);
    if (2 * k + 1 <= Nr.degree()) {
      addP(Nr.coeff(2 * k + 1) / 2, k + 1, k);
      addP(Nr.coeff(2 * k + 1) / 2, k, k + 1);
    }
  }
  // corrections c_{jl} v_j(z1) v_l(z2) are additive outside the
  // (x1-x2)^2 division
  std::vector<std::pair<Series<F>, Series<F>>> post_terms;
  if (!cmat_.empty()) {
    int g = genus();
    for (int j = 1; j <= g; ++j)
      for (int l = 1; l <= g; ++l) {
        F cc = cmat_[static_cast<size_t>(j - 1)][static_cast<size_t>(l - 1)];
        if (is_zero_v(cc)) continue;
        post_terms.push_back({cc * (xpowA[static_cast<size_t>(j - 1)] * dxA * invYA),
                              xpowB[static_cast<size_t>(l - 1)] * dxB * invYB});
      }
  }

  // accumulate numerator rows (coefficients of v^a as series in v')
  int min_vlead = 0;
  for (const auto& [L, R] : terms) min_vlead = std::min(min_vlead, L.valuation());
  // denominator (x_A(v) - x_B(v'))^2 rows
  Series<F> xB = SB.x.truncated(whi).compressed();
  // build denominator rows directly: (xA(v) - xB(v'))^2
  // xA(v) = sum_a xa_a v^a (Laurent); treat as rows with constant series
  Series<F> xA = SA.x.truncated(guard).compressed();
  int xa_lo = xA.valuation();
  std::vector<F> xa;
  for (int e = xa_lo; e < std::min(xA.order(), rows + xa_lo + 8); ++e) xa.push_back(xA.coeff(e));
  // diff rows: row for v^e of (xA - xB): e = xa-exponents, plus row 0 gets -xB
  int diff_lo = std::min(xa_lo, 0);
  int diff_n = rows + 8 + (0 - diff_lo);
  std::vector<Series<F>> diff(static_cast<size_t>(diff_n), Series<F>::o(whi));
  for (int i = 0; i < static_cast<int>(xa.size()); ++i) {
    int e = xa_lo + i;
    if (e - diff_lo < diff_n && !is_zero_v(xa[static_cast<size_t>(i)]))
      diff[static_cast<size_t>(e - diff_lo)] += Series<F>::constant(xa[static_cast<size_t>(i)], whi);
  }
  diff[static_cast<size_t>(0 - diff_lo)] -= xB;
  for (auto& d : diff) d = d.compressed();
  // square the diff rows
  int den_lo = 2 * diff_lo;
  int den_n = rows + 8;
  std::vector<Series<F>> den(static_cast<size_t>(den_n), Series<F>::o(whi));
  for (int i = 0; i < diff_n; ++i)
    for (int j = 0; j < diff_n; ++j) {
      int e = 2 * diff_lo + i + j - den_lo;
      if (e >= den_n) continue;
      if (diff[static_cast<size_t>(i)].known_zero() || diff[static_cast<size_t>(j)].known_zero()) continue;
      den[static_cast<size_t>(e)] += diff[static_cast<size_t>(i)] * diff[static_cast<size_t>(j)];
    }

  // numerator rows
  int num_lo = min_vlead;
  int num_n = den_n + rows + 8;
  std::vector<Series<F>> num(static_cast<size_t>(num_n), Series<F>::o(whi));
  for (const auto& [L, R] : terms) {
    Series<F> Rt = R.truncated(whi).compressed();
    for (int e = L.valuation(); e < std::min(L.order(), num_lo + num_n); ++e) {
      if (is_zero_v(L.coeff(e))) continue;
      num[static_cast<size_t>(e - num_lo)] += L.coeff(e) * Rt;
    }
  }

  // divide rows: C = num / den in the |v| << |v'| ordering
  Series<F> b0inv = den[0].inverse();
  int out_lo = num_lo - den_lo;
  Rows<F> out = Rows<F>::zero(out_lo, rows, whi);
  for (int a = 0; a < rows; ++a) {
    Series<F> acc = (a < num_n) ? num[static_cast<size_t>(a)] : Series<F>::o(whi);
    for (int k = 1; k <= a && k < den_n; ++k) {
      if (den[static_cast<size_t>(k)].known_zero() || out.r[static_cast<size_t>(a - k)].known_zero()) continue;
      acc -= den[static_cast<size_t>(k)] * out.r[static_cast<size_t>(a - k)];
    }
    out.r[static_cast<size_t>(a)] = (acc * b0inv).truncated(whi).compressed();
  }
  for (const auto& [L, R] : post_terms) {
    Series<F> Rt = R.truncated(whi).compressed();
    for (int e = L.valuation(); e < std::min(L.order(), out.vlead + static_cast<int>(out.r.size())); ++e) {
      if (e < out.vlead || is_zero_v(L.coeff(e))) continue;
      out.r[static_cast<size_t>(e - out.vlead)] += L.coeff(e) * Rt;
    }
  }
  return out;
}

template <class F>
void Bergman<F>::build_rectangles() {
  int n = num_sites();
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B) {
      Rows<F> rows = assemble_pair(A, B);
      bool same = sites_[static_cast<size_t>(A)].same_point(sites_[static_cast<size_t>(B)]);
      // subtract the diagonal kernel expansion sum_a (a+1) v^a v'^{-a-2}
      if (same) {
        for (int a = 0; a < static_cast<int>(rows.r.size()); ++a) {
          int e = a + rows.vlead;
          if (e < 0) continue;
          auto& s = rows.r[static_cast<size_t>(a)];
          s.set_coeff(-e - 2, s.coeff(-e - 2) - from_rat<F>(Rat(e + 1)));
        }
      }
      // collect the Taylor rectangle and verify no negative powers survive
      int Wr = W_;
      std::vector<std::vector<F>> R(static_cast<size_t>(Wr), std::vector<F>(static_cast<size_t>(Wr), F(0)));
      double scale = 0;
      for (int a = 0; a < Wr; ++a) {
        int idx = a - rows.vlead;
        if (idx < 0 || idx >= static_cast<int>(rows.r.size())) continue;
        for (int b = 0; b < Wr; ++b) scale = std::max(scale, mag(rows.r[static_cast<size_t>(idx)].coeff(b)));
      }
      for (int a = 0; a < static_cast<int>(rows.r.size()); ++a) {
        int e = a + rows.vlead;
        const auto& s = rows.r[static_cast<size_t>(a)];
        // rows with negative v-power, and negative v'-powers of regular rows,
        // must vanish (to roundoff in float mode)
        int bound = (e < 0) ? s.order() : 0;
        for (int b = s.valuation(); b < bound; ++b) {
          double m = mag(s.coeff(b));
          if constexpr (field_traits<F>::is_exact)
            check(m == 0, errc::internal, "Bergman expansion fails to be regular");
          else
            check(m <= 1e-18 * std::max(1.0, scale), errc::internal,
                  "Bergman expansion fails to be regular: pair (" + std::to_string(A) + "," +
                      std::to_string(B) + ") row " + std::to_string(e) + " col " + std::to_string(b) +
                      " junk " + std::to_string(m) + " scale " + std::to_string(scale));
        }
        if (e < 0 || e >= Wr) continue;
        for (int b = 0; b < Wr; ++b) R[static_cast<size_t>(e)][static_cast<size_t>(b)] = s.coeff(b);
      }
      rect_[{A, B}] = std::move(R);
    }
}

}  // namespace trq

#endif
