#ifndef TRQUANT_CURVE_HPP
#define TRQUANT_CURVE_HPP

// Classical spectral curve y^2 = f_phi(x): admissibility, local charts with
// signed branch series, times, and the Torelli marking bookkeeping.
//
// Internal polynomial model: with D = prod (x-X_nu)^{r_nu}, the function
// Y := y * D satisfies Y^2 = N where f_phi = N / D^2. Branch points are the
// (simple) zeros of N; infinity is ramified iff deg N is odd.

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "trquant/detail/roots.hpp"
#include "trquant/errors.hpp"
#include "trquant/poly.hpp"
#include "trquant/ratfun.hpp"
#include "trquant/series.hpp"

namespace trq {

struct PoleSpec {
  Rat X;
  int r;  // half the pole order of f_phi
};

struct DivisorSpec {
  std::vector<PoleSpec> finite;
  int r_inf = 0;
  int n_inf = 0;

  int genus() const {
    int s = r_inf - 3;
    for (const auto& p : finite) s += p.r;
    return s;
  }
};

// Identifies a pole of omega_{0,1} on the curve: finite index nu (or -1 for
// infinity) plus a sheet; sheet 0 is the principal ('+') preimage. For
// n_inf = 1 the infinite pole has a single preimage (sheet 0).
struct PolePoint {
  int nu;     // -1 = infinity
  int sheet;  // 0 or 1
  bool operator==(const PolePoint& o) const { return nu == o.nu && sheet == o.sheet; }
  bool operator<(const PolePoint& o) const { return std::tie(nu, sheet) < std::tie(o.nu, o.sheet); }
};

struct TimeId {
  int p;  // -1 = infinity, else finite pole index
  int k;
  bool operator==(const TimeId& o) const { return p == o.p && k == o.k; }
  bool operator<(const TimeId& o) const { return std::tie(p, k) < std::tie(o.p, o.k); }
  std::string str() const {
    return std::string("T[") + (p < 0 ? "inf" : std::to_string(p)) + "," + std::to_string(k) + "]";
  }
};

struct TorelliMarking {
  // A_j encircles the j-th listed cut; each cut is a pair of indices into the
  // sorted branch-point list. B_j encircles the bridge between its cut's
  // right end and the next cut's left end (path data in the same indexing).
  std::vector<std::pair<int, int>> cuts;
  std::vector<std::pair<int, int>> bridges;
};

template <class F>
struct RamChart {
  Chart<F> chart;    // finite_sqrt at u, or inf_sqrt
  F u{};             // finite branch x-value (unused for the infinite one)
  bool at_infinity = false;
  Series<F> Y;       // polynomial-model branch series, odd (finite case)
  Series<F> y;       // true y-series in the chart variable
};

template <class F>
struct PoleChartData {
  PolePoint id;
  Chart<F> chart;   // finite_reg at X_nu, inf_reg, or inf_sqrt
  Series<F> y;      // y-series on this sheet, Laurent in the chart variable
};

struct Times {
  std::map<TimeId, Rat> exact;                 // set only in exact mode
  std::map<TimeId, std::complex<double>> approx;  // always set (reporting)
  std::vector<TimeId> ids;                     // declared times, fixed order
  // residue pseudo-time at infinity when n_inf = 1 (determined, not free)
  bool has_resid_inf = false;
};

template <class F>
class CurveGeometry {
 public:
  // f with rational coefficients; working field F.
  CurveGeometry(RatFun<Rat> f_rat, DivisorSpec div, int series_order)
      : f_rat_(std::move(f_rat)), div_(std::move(div)), ord_(series_order) {
    validate_and_build();
  }

  const DivisorSpec& divisor() const { return div_; }
  int genus() const { return div_.genus(); }
  int n_inf() const { return div_.n_inf; }
  const RatFun<Rat>& f_rat() const { return f_rat_; }
  const RatFun<F>& f() const { return f_; }
  const Poly<Rat>& N_rat() const { return N_rat_; }
  const Poly<F>& N() const { return N_; }
  const Poly<F>& D() const { return D_; }
  int order() const { return ord_; }

  // finite ramification data
  int num_branch() const { return static_cast<int>(ram_.size()); }
  const std::vector<RamChart<F>>& ram() const { return ram_; }
  const RamChart<F>& ram(int i) const { return ram_.at(static_cast<size_t>(i)); }
  bool inf_ramified() const { return div_.n_inf == 1; }
  const RamChart<F>& ram_inf() const {
    check(inf_ramified(), errc::internal, "infinity is not a ramification point");
    return ram_inf_;
  }

  const std::vector<PoleChartData<F>>& pole_charts() const { return poles_; }
  const PoleChartData<F>& pole_chart(PolePoint p) const {
    for (const auto& pc : poles_)
      if (pc.id == p) return pc;
    fail(errc::internal, "pole chart not found");
  }
  F pole_x(int nu) const { return from_rat<F>(div_.finite.at(static_cast<size_t>(nu)).X); }

  const Times& times() const { return times_; }
  F time_value(TimeId id) const {
    auto it = times_.approx.find(id);
    check(it != times_.approx.end(), errc::unknown_time, "undeclared time " + id.str());
    if constexpr (field_traits<F>::is_exact) {
      return times_.exact.at(id);
    } else {
      // recompute from the y-series for full precision
      return time_from_series(id);
    }
  }
  bool global_sign_flipped() const { return flipped_; }

  // y on the principal sheet at a numeric point, by branch tracking from the
  // base point (float mode).
  F y_principal(const F& x) const;

  F base_point() const { return base_; }

 private:
  void validate_and_build();
  F time_from_series(TimeId id) const;

  RatFun<Rat> f_rat_;
  DivisorSpec div_;
  int ord_;
  RatFun<F> f_;
  Poly<Rat> N_rat_, D_rat_;
  Poly<F> N_, D_;
  std::vector<RamChart<F>> ram_;
  RamChart<F> ram_inf_;
  std::vector<PoleChartData<F>> poles_;
  Times times_;
  bool flipped_ = false;
  F base_{0};

  friend struct CurveBuilderAccess;
};

// ---------------------------------------------------------------------------

namespace detail {

// Track y = sqrt(N(x)) / D(x) along a polyline, starting from a given value.
template <class F>
F track_sqrt(const Poly<F>& N, F y0sq_start_x, const std::vector<F>& path, F y_start) {
  F y = y_start;
  (void)y0sq_start_x;
  for (size_t i = 1; i < path.size(); ++i) {
    F target = field_traits<F>::sqrt(N.eval(path[i]));
    if (mag(target - y) > mag(-target - y)) target = -target;
    y = target;
  }
  return y;
}

// Evenly spaced polyline between two points, detouring around listed
// singular points if the straight segment passes too close.
template <class F>
std::vector<F> polyline(const F& a, const F& b, const std::vector<F>& avoid, int n) {
  auto dist_seg = [](const F& p, const F& q, const F& z) {
    // distance from z to segment pq, crude but adequate
    double best = 1e300;
    for (int k = 0; k <= 32; ++k) {
      F w = p + (q - p) * F(typename field_traits<F>::real_type(k / 32.0));
      best = std::min(best, mag(F(w - z)));
    }
    return best;
  };
  double close = 1e300;
  for (const auto& z : avoid) close = std::min(close, dist_seg(a, b, z));
  std::vector<F> nodes;
  double scale = std::max(1.0, mag(F(b - a)));
  if (close > 0.05 * scale) {
    for (int k = 0; k <= n; ++k)
      nodes.push_back(a + (b - a) * F(typename field_traits<F>::real_type(double(k) / n)));
    return nodes;
  }
  // detour via a perpendicular offset at the midpoint
  F mid = (a + b) * F(typename field_traits<F>::real_type(0.5));
  F dir = b - a;
  F perp = dir * imag_unit<field_traits<F>::precision_bits>();
  F way = mid + perp;  // deterministic side
  for (int k = 0; k <= n; ++k) nodes.push_back(a + (way - a) * F(typename field_traits<F>::real_type(double(k) / n)));
  for (int k = 1; k <= n; ++k) nodes.push_back(way + (b - way) * F(typename field_traits<F>::real_type(double(k) / n)));
  return nodes;
}

inline std::complex<double> cd(const Rat& q) { return {q.convert_to<double>(), 0.0}; }

// double-precision principal-sheet value of Y at x, tracked from base.
inline std::complex<double> track_double(const Poly<Rat>& N, std::complex<double> base,
                                         std::complex<double> ybase, std::complex<double> x,
                                         const std::vector<std::complex<double>>& avoid) {
  auto evalN = [&](std::complex<double> z) {
    std::complex<double> acc = 0;
    for (int e = N.degree(); e >= 0; --e) acc = acc * z + cd(N.coeff(e));
    return acc;
  };
  // straight path with midpoint detour if needed
  std::vector<std::complex<double>> nodes;
  int n = 256;
  bool need_detour = false;
  for (const auto& z : avoid) {
    for (int k = 0; k <= 32; ++k) {
      auto w = base + (x - base) * (k / 32.0);
      if (std::abs(w - z) < 0.04 * std::max(1.0, std::abs(x - base))) need_detour = true;
    }
  }
  if (!need_detour) {
    for (int k = 0; k <= n; ++k) nodes.push_back(base + (x - base) * (double(k) / n));
  } else {
    auto mid = (base + x) * 0.5 + std::complex<double>(0, 1) * (x - base);
    for (int k = 0; k <= n; ++k) nodes.push_back(base + (mid - base) * (double(k) / n));
    for (int k = 1; k <= n; ++k) nodes.push_back(mid + (x - mid) * (double(k) / n));
  }
  std::complex<double> y = ybase;
  for (size_t i = 1; i < nodes.size(); ++i) {
    auto t = std::sqrt(evalN(nodes[i]));
    if (std::abs(t - y) > std::abs(-t - y)) t = -t;
    y = t;
  }
  return y;
}

}  // namespace detail

template <class F>
void CurveGeometry<F>::validate_and_build() {
  check(!f_rat_.num().is_zero(), errc::not_admissible, "f_phi vanishes identically");

  // Split f = N / D^2 against the declared divisor.
  Poly<Rat> den = f_rat_.den();
  Poly<Rat> num = f_rat_.num();
  D_rat_ = Poly<Rat>(Rat(1));
  for (const auto& p : div_.finite) {
    Poly<Rat> lin = Poly<Rat>::from_root(p.X);
    for (int k = 0; k < p.r; ++k) D_rat_ *= lin;
  }
  Poly<Rat> d2 = D_rat_ * D_rat_;
  // N = f * D^2 must be a polynomial with N(X_nu) != 0 (maximal pole order)
  Poly<Rat> q, r;
  Poly<Rat> nd = num * d2;
  Poly<Rat>::divmod(nd, den, q, r);
  check(r.is_zero(), errc::not_admissible,
        "declared divisor inconsistent: f * D^2 is not a polynomial (degree mismatch with declared (r, n_inf))");
  N_rat_ = q;
  for (const auto& p : div_.finite)
    check(N_rat_(p.X) != 0, errc::not_admissible,
          "zero-at-pole: f_phi vanishes at declared pole (or pole order below 2r)");

  // degree bookkeeping: deg N = 2g + 2 - n_inf
  int g = div_.genus();
  check(g >= 0, errc::not_admissible, "declared divisor gives negative genus");
  check(N_rat_.degree() == 2 * g + 2 - div_.n_inf, errc::not_admissible,
        "degree mismatch with declared (r_inf, n_inf)");

  // simple zeros: gcd(N, N') constant
  Poly<Rat> gz = Poly<Rat>::gcd(N_rat_, N_rat_.derivative());
  check(gz.degree() <= 0, errc::not_admissible, "multiple zero of f_phi");

  f_ = RatFun<F>(poly_cast<F>(f_rat_.num()), poly_cast<F>(f_rat_.den()));
  N_ = poly_cast<F>(N_rat_);
  D_ = poly_cast<F>(D_rat_);

  // Branch x-values.
  std::vector<F> roots;
  if constexpr (field_traits<F>::is_exact) {
    // exact mode is restricted to genus 0 (deg N <= 2)
    check(g == 0, errc::not_admissible, "exact mode supports genus 0 only; use float mode");
    int d = N_rat_.degree();
    if (d == 1) {
      roots.push_back(-N_rat_.coeff(0) / N_rat_.coeff(1));
    } else {  // d == 2
      Rat a = N_rat_.coeff(2), b = N_rat_.coeff(1), c = N_rat_.coeff(0);
      Rat disc = b * b - 4 * a * c;
      Rat sq = sqrt_exact(disc);  // throws if irrational: caller falls back to float
      roots.push_back((-b + sq) / (2 * a));
      roots.push_back((-b - sq) / (2 * a));
    }
  } else {
    roots = detail::roots<F>(N_rat_);
  }
  // deterministic order: by real part, then imaginary part
  std::sort(roots.begin(), roots.end(), [](const F& a, const F& b) {
    double ra, rb, ia, ib;
    if constexpr (field_traits<F>::is_exact) {
      ra = a.template convert_to<double>(), rb = b.template convert_to<double>(), ia = ib = 0;
    } else {
      ra = a.real().template convert_to<double>();
      rb = b.real().template convert_to<double>();
      ia = a.imag().template convert_to<double>();
      ib = b.imag().template convert_to<double>();
    }
    return ra < rb || (ra == rb && ia < ib);
  });
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      check(mag(F(roots[i] - roots[j])) > 1e-12, errc::not_admissible, "coincident branch points");

  // base point for branch tracking: to the right of everything
  double reach = 1;
  for (const auto& u : roots) reach = std::max(reach, 2 * mag(u));
  for (const auto& p : div_.finite) reach = std::max(reach, 2 * std::abs(p.X.convert_to<double>()));
  base_ = from_rat<F>(Rat(static_cast<long>(reach * 2 + 3)));

  // double-precision sign calibration data
  std::complex<double> based(mag(base_), 0.0);
  auto evalNd = [&](std::complex<double> z) {
    std::complex<double> acc = 0;
    for (int e = N_rat_.degree(); e >= 0; --e) acc = acc * z + detail::cd(N_rat_.coeff(e));
    return acc;
  };
  std::vector<std::complex<double>> avoid;
  for (const auto& u : roots) {
    if constexpr (field_traits<F>::is_exact) avoid.push_back({u.template convert_to<double>(), 0});
    else avoid.push_back({u.real().template convert_to<double>(), u.imag().template convert_to<double>()});
  }
  for (const auto& p : div_.finite) avoid.push_back(detail::cd(p.X));
  std::complex<double> ybase = std::sqrt(evalNd(based));

  // Global branch: fix so that the leading coefficient of y at the first
  // listed pole (infinity) has positive real part, ties broken by positive
  // imaginary part. Leading behavior at +infinity on the tracked sheet is
  // ybase-asymptotic; the sign of ybase at the (real, positive) base point
  // already carries that information.
  {
    std::complex<double> lead = ybase;  // sign carrier
    if (!(lead.real() > 0 || (lead.real() == 0 && lead.imag() > 0))) {
      ybase = -ybase;
      flipped_ = true;
    }
  }

  // Ramification charts at finite branch points.
  int guard = ord_ + 2 * (N_rat_.degree() + D_rat_.degree()) + 8;
  for (size_t i = 0; i < roots.size(); ++i) {
    RamChart<F> rc;
    rc.u = roots[i];
    rc.chart = Chart<F>{ChartKind::finite_sqrt, rc.u};
    Series<F> Nser = detail::poly_in_chart<F>(N_, rc.chart, guard);
    Series<F> Yser = Nser.sqrt();  // valuation 1, principal leading sqrt
    // calibrate sign against the tracked sheet a bit away from u
    double delta = 1e-3;
    std::complex<double> ud = avoid[i];
    std::complex<double> probe = ud + std::complex<double>(delta, delta / 3);
    std::complex<double> ytracked = detail::track_double(N_rat_, based, ybase, probe, avoid);
    // series value at s = sqrt(probe - u), principal square root
    std::complex<double> s = std::sqrt(probe - ud);
    std::complex<double> yser = 0;
    std::complex<double> spow = 1;
    for (int e = 0; e < Yser.order(); ++e) {
      if (e >= Yser.valuation()) {
        std::complex<double> ce;
        if constexpr (field_traits<F>::is_exact) ce = {Yser.coeff(e).template convert_to<double>(), 0};
        else
          ce = {Yser.coeff(e).real().template convert_to<double>(),
                Yser.coeff(e).imag().template convert_to<double>()};
        yser += ce * spow;
      }
      spow *= s;
    }
    if (std::abs(yser - ytracked) > std::abs(yser + ytracked)) Yser = -Yser;
    rc.Y = Yser.truncated(ord_);
    Series<F> Dser = detail::poly_in_chart<F>(D_, rc.chart, guard).truncated(ord_ + 4);
    rc.y = (rc.Y * Dser.inverse()).truncated(ord_);
    ram_.push_back(std::move(rc));
  }

  // Infinite ramification chart (n_inf = 1).
  if (div_.n_inf == 1) {
    ram_inf_.at_infinity = true;
    ram_inf_.chart = Chart<F>{ChartKind::inf_sqrt, F(0)};
    Series<F> Nser = detail::poly_in_chart<F>(N_, ram_inf_.chart, guard);
    Series<F> Yser = Nser.sqrt();
    // sign calibration at large real x on the principal sheet: there the
    // tracked value is ~ ybase continued straight out, i.e. sqrt(N) with the
    // sign of ybase at base_
    std::complex<double> s0(1.0 / std::sqrt(std::abs(based)), 0);
    std::complex<double> yser = 0;
    for (int e = Yser.valuation(); e < Yser.order(); ++e) {
      std::complex<double> ce;
      if constexpr (field_traits<F>::is_exact) ce = {Yser.coeff(e).template convert_to<double>(), 0};
      else
        ce = {Yser.coeff(e).real().template convert_to<double>(),
              Yser.coeff(e).imag().template convert_to<double>()};
      yser += ce * std::pow(s0, e);
    }
    if (std::abs(yser - ybase) > std::abs(yser + ybase)) Yser = -Yser;
    ram_inf_.Y = Yser.truncated(ord_);
    Series<F> Dser = detail::poly_in_chart<F>(D_, ram_inf_.chart, guard).truncated(guard);
    ram_inf_.y = (ram_inf_.Y * Dser.inverse()).truncated(ord_);
  }

  // Pole charts and times.
  auto push_pole = [&](PolePoint id, Chart<F> ch) {
    PoleChartData<F> pc;
    pc.id = id;
    pc.chart = ch;
    Series<F> fser = detail::poly_in_chart<F>(poly_cast<F>(f_rat_.num()), ch, guard) *
                     detail::poly_in_chart<F>(poly_cast<F>(f_rat_.den()), ch, guard).inverse();
    Series<F> yser = fser.compressed().sqrt();
    // sheet 0 = principal: calibrate with tracked double value near the pole
    std::complex<double> probe;
    if (id.nu >= 0) probe = detail::cd(div_.finite[static_cast<size_t>(id.nu)].X) + std::complex<double>(7e-3, 3e-3);
    else probe = based * 1.7;  // near infinity: large x
    std::complex<double> ytracked = detail::track_double(N_rat_, based, ybase, probe, avoid);
    // convert to true y: y = Y / D(x)
    std::complex<double> dd = 1;
    for (const auto& p : div_.finite)
      for (int k = 0; k < p.r; ++k) dd *= (probe - detail::cd(p.X));
    ytracked /= dd;
    // chart variable value at probe
    std::complex<double> v;
    switch (ch.kind) {
      case ChartKind::finite_reg: v = probe - detail::cd(div_.finite[static_cast<size_t>(id.nu)].X); break;
      case ChartKind::inf_reg: v = 1.0 / probe; break;
      case ChartKind::inf_sqrt: v = 1.0 / std::sqrt(probe); break;
      default: v = 0; break;
    }
    std::complex<double> yser_d = 0;
    for (int e = yser.valuation(); e < yser.order(); ++e) {
      std::complex<double> ce;
      if constexpr (field_traits<F>::is_exact) ce = {yser.coeff(e).template convert_to<double>(), 0};
      else
        ce = {yser.coeff(e).real().template convert_to<double>(),
              yser.coeff(e).imag().template convert_to<double>()};
      yser_d += ce * std::pow(v, e);
    }
    bool flip = std::abs(yser_d - ytracked) > std::abs(yser_d + ytracked);
    if ((flip && id.sheet == 0) || (!flip && id.sheet == 1)) yser = -yser;
    pc.y = yser.truncated(ord_);
    poles_.push_back(std::move(pc));
  };

  for (int nu = 0; nu < static_cast<int>(div_.finite.size()); ++nu) {
    Chart<F> ch{ChartKind::finite_reg, pole_x(nu)};
    push_pole(PolePoint{nu, 0}, ch);
    push_pole(PolePoint{nu, 1}, ch);
  }
  if (div_.n_inf == 0) {
    Chart<F> ch{ChartKind::inf_reg, F(0)};
    push_pole(PolePoint{-1, 0}, ch);
    push_pole(PolePoint{-1, 1}, ch);
  } else {
    Chart<F> ch{ChartKind::inf_sqrt, F(0)};
    push_pole(PolePoint{-1, 0}, ch);
  }

  // --- times -----------------------------------------------------------
  // templates (principal sheet):
  //   finite nu : y = + sum_k T_{nu,k} (x-X)^{-k} + O(1)
  //   inf n=0   : y = - sum_k T_{inf,k} x^{k-2} + O(x^{-2})
  //   inf n=1   : y = - sum_k (T_{inf,k}/2) x^{k-5/2} + ...
  for (int nu = 0; nu < static_cast<int>(div_.finite.size()); ++nu)
    for (int k = 1; k <= div_.finite[static_cast<size_t>(nu)].r; ++k)
      times_.ids.push_back(TimeId{nu, k});
  for (int k = (div_.n_inf == 0 ? 1 : 2); k <= div_.r_inf; ++k) times_.ids.push_back(TimeId{-1, k});
  std::sort(times_.ids.begin(), times_.ids.end());
  for (const auto& id : times_.ids) {
    F tv = time_from_series(id);
    if constexpr (field_traits<F>::is_exact) {
      times_.exact[id] = tv;
      times_.approx[id] = {tv.template convert_to<double>(), 0};
    } else {
      times_.approx[id] = {tv.real().template convert_to<double>(), tv.imag().template convert_to<double>()};
    }
  }
  times_.has_resid_inf = (div_.n_inf == 1);
  // leading times must not vanish
  for (int nu = 0; nu < static_cast<int>(div_.finite.size()); ++nu) {
    TimeId lead{nu, div_.finite[static_cast<size_t>(nu)].r};
    check(std::abs(times_.approx.at(lead)) > 1e-12, errc::inconsistent_degrees,
          "leading time vanishes at finite pole");
  }
  check(std::abs(times_.approx.at(TimeId{-1, div_.r_inf})) > 1e-12, errc::inconsistent_degrees,
        "leading time vanishes at infinity");
}

template <class F>
F CurveGeometry<F>::time_from_series(TimeId id) const {
  if (id.p >= 0) {
    const auto& pc = pole_chart(PolePoint{id.p, 0});
    return pc.y.coeff(-id.k);
  }
  if (div_.n_inf == 0) {
    const auto& pc = pole_chart(PolePoint{-1, 0});
    // y = -sum T_k x^{k-2}: chart xi=1/x, x^{k-2} = xi^{2-k}
    return -pc.y.coeff(2 - id.k);
  }
  const auto& pc = pole_chart(PolePoint{-1, 0});
  // y = -(T_k/2) x^{(2k-5)/2}: chart xi = x^{-1/2}, exponent 5-2k
  return F(-2) * pc.y.coeff(5 - 2 * id.k);
}

template <class F>
F CurveGeometry<F>::y_principal(const F& x) const {
  static_assert(!field_traits<F>::is_exact, "numeric sheet tracking is float-mode only");
  std::vector<F> avoid;
  for (const auto& rc : ram_) avoid.push_back(rc.u);
  for (const auto& p : div_.finite) avoid.push_back(from_rat<F>(p.X));
  auto nodes = detail::polyline<F>(base_, x, avoid, 200);
  F y = field_traits<F>::sqrt(N_.eval(base_));
  if (flipped_) y = -y;
  for (size_t i = 1; i < nodes.size(); ++i) {
    F t = field_traits<F>::sqrt(N_.eval(nodes[i]));
    if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
    y = t;
  }
  return y / D_.eval(x);
}

// validate_admissible per the spec surface: construct-and-report.
template <class F>
struct RamificationData {
  std::vector<F> u;
  int genus;
  bool infinite_ramification;
};

template <class F>
RamificationData<F> validate_admissible(const CurveGeometry<F>& c) {
  RamificationData<F> rd;
  for (const auto& rc : c.ram()) rd.u.push_back(rc.u);
  rd.genus = c.genus();
  rd.infinite_ramification = c.inf_ramified();
  return rd;
}

}  // namespace trq

#endif
