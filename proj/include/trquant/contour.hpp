#ifndef TRQUANT_CONTOUR_HPP
#define TRQUANT_CONTOUR_HPP

// Closed contours around branch cuts, branch-tracked evaluation of 1-forms
// g(x) + h(x)/y on the principal sheet, and trapezoidal contour quadrature
// with node doubling. Float mode only.

#include <functional>
#include <vector>

#include "trquant/curve.hpp"

namespace trq {

// A closed contour in the x-plane given as an ellipse around two points.
// Nodes are computed at working precision; double-precision angles would cap
// the spectral trapezoid accuracy far above the field epsilon.
template <class F>
struct Contour {
  F center;
  F semi_major;  // complex: includes direction
  double minor_ratio = 0.45;
  bool reversed = false;  // orientation flip (theta -> -theta)

  void trig(long k, long n, F& c, F& s) const {
    using RT = typename field_traits<F>::real_type;
    RT theta = 2 * field_traits<F>::pi() * RT(k) / RT(n);
    if (reversed) theta = -theta;
    c = F(cos(theta));
    s = F(sin(theta));
  }
  F point(long k, long n) const {
    using RT = typename field_traits<F>::real_type;
    F c, s;
    trig(k, n, c, s);
    return center + semi_major * (c + imag_unit<field_traits<F>::precision_bits>() * F(RT(minor_ratio)) * s);
  }
  F tangent(long k, long n) const {  // d point / d (quadrature angle)
    using RT = typename field_traits<F>::real_type;
    F c, s;
    trig(k, n, c, s);
    F t = semi_major * (-s + imag_unit<field_traits<F>::precision_bits>() * F(RT(minor_ratio)) * c);
    return reversed ? F(-t) : t;
  }
};

// Build the ellipse around points a and b, keeping the listed points outside
// (shrinks the minor axis, then grows the major margin if impossible).
template <class F>
Contour<F> contour_around(const F& a, const F& b, const std::vector<F>& keep_out) {
  Contour<F> ct;
  ct.center = (a + b) * from_rat<F>(Rat(1, 2));
  F half = (b - a) * from_rat<F>(Rat(1, 2));
  double margin = 1.35;
  for (int attempt = 0; attempt < 40; ++attempt) {
    using RT = typename field_traits<F>::real_type;
    ct.semi_major = half * F(RT(margin));
    bool ok = true;
    for (const auto& z : keep_out) {
      // in ellipse coordinates: w = (z - center)/semi_major, inside iff
      // (Re w)^2 + (Im w / minor_ratio)^2 < 1 (with padding)
      F w = (z - ct.center) / ct.semi_major;
      double wr = w.real().template convert_to<double>();
      double wi = w.imag().template convert_to<double>();
      double rad = wr * wr + (wi / ct.minor_ratio) * (wi / ct.minor_ratio);
      if (rad < 1.25) ok = false;
    }
    if (ok) return ct;
    if (ct.minor_ratio > 0.1) ct.minor_ratio *= 0.75;
    else {
      margin *= 0.97;
      check(margin > 1.01, errc::path_crosses_cycle, "cannot separate contour from other singularities");
    }
  }
  fail(errc::path_crosses_cycle, "cannot build contour around cut");
}

// Branch-tracked values of Y = sqrt(N) along a closed contour (n nodes,
// theta_k = 2 pi k / n), starting from the principal sheet.
template <class F>
std::vector<F> track_contour_Y(const CurveGeometry<F>& c, const Contour<F>& ct, int n) {
  std::vector<F> xs(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) xs[static_cast<size_t>(k)] = ct.point(k, n);
  // walk from base point to the first node
  std::vector<F> avoid;
  for (const auto& rc : c.ram()) avoid.push_back(rc.u);
  for (size_t nu = 0; nu < c.divisor().finite.size(); ++nu) avoid.push_back(c.pole_x(static_cast<int>(nu)));
  auto lead_in = detail::polyline<F>(c.base_point(), xs[0], avoid, 400);
  F y = field_traits<F>::sqrt(c.N().eval(c.base_point()));
  if (c.global_sign_flipped()) y = -y;
  for (size_t i = 1; i < lead_in.size(); ++i) {
    F t = field_traits<F>::sqrt(c.N().eval(lead_in[i]));
    if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
    y = t;
  }
  std::vector<F> Ys(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    F t = field_traits<F>::sqrt(c.N().eval(xs[static_cast<size_t>(k)]));
    if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
    y = t;
    Ys[static_cast<size_t>(k)] = y;
  }
  // closing the loop must flip the sheet iff the contour encircles an odd
  // number of branch points; for cut contours it encircles two, so it closes.
  F t = field_traits<F>::sqrt(c.N().eval(xs[0]));
  if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
  check(mag(F(t - Ys[0])) < 1e-20 * std::max(1.0, mag(t)), errc::path_crosses_cycle,
        "contour does not close on the starting sheet");
  return Ys;
}

// Closed-contour integral of a 1-form given by values f(x, Y) dx, by the
// trapezoid rule with node doubling until two refinements agree.
template <class F>
F contour_integral(const CurveGeometry<F>& c, const Contour<F>& ct,
                   const std::function<F(const F&, const F&)>& integrand, double tol,
                   int n0 = 64, int nmax = 1 << 15) {
  F prev(0);
  bool have_prev = false;
  for (int n = n0; n <= nmax; n *= 2) {
    auto Ys = track_contour_Y(c, ct, n);
    F acc(0);
    for (int k = 0; k < n; ++k) {
      F x = ct.point(k, n);
      F dx = ct.tangent(k, n);
      acc += integrand(x, Ys[static_cast<size_t>(k)]) * dx;
    }
    using RT = typename field_traits<F>::real_type;
    acc *= F(RT(2 * M_PI / n));
    if (have_prev && mag(F(acc - prev)) < tol * std::max(1.0, mag(acc))) return acc;
    prev = acc;
    have_prev = true;
  }
  fail(errc::quadrature_non_convergent, "contour quadrature did not stabilize");
}

// Gauss-Legendre nodes/weights on [0, 1], double precision (seeds only; the
// quadratures refine them to working precision below).
inline void gauss_legendre_01(int n, std::vector<double>& xs, std::vector<double>& ws) {
  xs.resize(static_cast<size_t>(n));
  ws.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    xs[static_cast<size_t>(i)] = 0.5 * (1 - x);
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1);
    ws[static_cast<size_t>(i)] = 1.0 / ((1 - x * x) * dp * dp);
  }
}

// Full-precision Gauss-Legendre nodes/weights on [0,1]: double seeds refined
// by Newton in the working real type, cached per order.
template <class RT>
const std::pair<std::vector<RT>, std::vector<RT>>& gl01_hp(int n) {
  static std::map<int, std::pair<std::vector<RT>, std::vector<RT>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> xs, ws;
  gauss_legendre_01(n, xs, ws);
  std::vector<RT> X(static_cast<size_t>(n)), W(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    RT x = RT(1) - 2 * RT(xs[static_cast<size_t>(i)]);  // back to [-1,1]
    RT p1(0), dp(0);
    for (int it2 = 0; it2 < 8; ++it2) {
      RT p0 = RT(1);
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        RT p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      RT dx = p1 / dp;
      x -= dx;
      if (abs(dx) < RT(1e-60)) break;
    }
    {
      RT p0 = RT(1);
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        RT p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    X[static_cast<size_t>(i)] = (RT(1) - x) / 2;
    W[static_cast<size_t>(i)] = RT(1) / ((1 - x * x) * dp * dp);
  }
  auto [pos, ok] = cache.emplace(n, std::make_pair(std::move(X), std::move(W)));
  (void)ok;
  return pos->second;
}

// Path integral from a finite branch point u (where the integrand has at
// worst a 1/Y singularity) to a regular endpoint, with the sqrt substitution
// x = u + tau^2 (end - u): Gauss-Legendre with doubling. The integrand is
// f(x, Y)dx with Y on the sheet reaching `y_end` at the endpoint.
template <class F>
F branch_to_point_integral(const CurveGeometry<F>& c, const F& u, const F& end, const F& y_end,
                           const std::function<F(const F&, const F&)>& integrand, double tol) {
  using RT = typename field_traits<F>::real_type;
  F prev(0);
  bool have_prev = false;
  for (int n = 48; n <= 6144; n *= 2) {
    const auto& [xs, ws] = gl01_hp<RT>(n);
    // track Y from the endpoint inward along tau decreasing
    std::vector<F> taus;
    for (const RT& t : xs) taus.push_back(F(t));
    // sort descending in tau so tracking starts at the endpoint
    std::vector<size_t> idx(taus.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return xs[a] > xs[b]; });
    F y = y_end;
    std::vector<F> Yvals(taus.size());
    for (size_t ii = 0; ii < idx.size(); ++ii) {
      F tau = taus[idx[ii]];
      F x = u + tau * tau * (end - u);
      F t = field_traits<F>::sqrt(c.N().eval(x));
      // compare against parallel-transported reference
      if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
      y = t;
      Yvals[idx[ii]] = y;
    }
    F acc(0);
    for (size_t i = 0; i < taus.size(); ++i) {
      F tau = taus[i];
      F x = u + tau * tau * (end - u);
      F dxdtau = F(2) * tau * (end - u);
      acc += F(ws[i]) * integrand(x, Yvals[i]) * dxdtau;
    }
    if (have_prev && mag(F(acc - prev)) < tol * std::max(1.0, mag(acc))) return acc;
    prev = acc;
    have_prev = true;
  }
  fail(errc::quadrature_non_convergent, "branch-point path quadrature did not stabilize");
}

// Straight-segment integral between two regular points on the tracked sheet,
// with the starting Y value supplied (and updated to the endpoint value).
// Gauss-Legendre with node doubling; the integrands here are analytic on a
// neighborhood of the segment.
namespace detail {
template <class F>
F segment_gl(const CurveGeometry<F>& c, const F& a, const F& b, const F& y_start, int n,
             const std::function<F(const F&, const F&)>& integrand, F& y_end) {
  using RT = typename field_traits<F>::real_type;
  const auto& [xs, ws] = gl01_hp<RT>(n);
  std::vector<size_t> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t p, size_t q) { return xs[p] < xs[q]; });
  F y = y_start;
  F acc(0);
  for (size_t oi = 0; oi < order.size(); ++oi) {
    size_t i = order[oi];
    F x = a + (b - a) * F(xs[i]);
    F t = field_traits<F>::sqrt(c.N().eval(x));
    if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
    y = t;
    acc += F(ws[i]) * integrand(x, t);
  }
  F t = field_traits<F>::sqrt(c.N().eval(b));
  if (mag(F(t - y)) > mag(F(-t - y))) t = -t;
  y_end = t;
  return acc * (b - a);
}

template <class F>
F segment_adaptive(const CurveGeometry<F>& c, const F& a, const F& b, const F& y_start,
                   const std::function<F(const F&, const F&)>& integrand, double tol, F& y_end,
                   int depth) {
  F ymid1, ymid2;
  F coarse = segment_gl<F>(c, a, b, y_start, 48, integrand, ymid1);
  F fine = segment_gl<F>(c, a, b, y_start, 96, integrand, ymid2);
  if (mag(F(coarse - fine)) < tol * std::max(1.0, mag(fine)) || depth >= 24) {
    check(depth < 24, errc::quadrature_non_convergent, "segment quadrature did not stabilize");
    y_end = ymid2;
    return fine;
  }
  using RT = typename field_traits<F>::real_type;
  F mid = a + (b - a) * F(RT(0.5));
  F yh;
  F left = segment_adaptive<F>(c, a, mid, y_start, integrand, tol, yh, depth + 1);
  F right = segment_adaptive<F>(c, mid, b, yh, integrand, tol, y_end, depth + 1);
  return left + right;
}
}  // namespace detail

// Straight-segment integral between two regular points on the tracked sheet,
// with the starting Y value supplied (and updated to the endpoint value).
// Adaptive Gauss-Legendre: bisects until two orders agree.
template <class F>
F segment_integral(const CurveGeometry<F>& c, const F& a, const F& b, F& y_inout,
                   const std::function<F(const F&, const F&)>& integrand, double tol) {
  F y_end;
  F v = detail::segment_adaptive<F>(c, a, b, y_inout, integrand, tol, y_end, 0);
  y_inout = y_end;
  return v;
}

}  // namespace trq

#endif
