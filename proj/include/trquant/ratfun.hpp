#ifndef TRQUANT_RATFUN_HPP
#define TRQUANT_RATFUN_HPP

// Univariate rational functions and their local (Frac)series expansions.

#include "trquant/poly.hpp"
#include "trquant/series.hpp"

namespace trq {

template <class T>
class RatFun {
 public:
  RatFun() : num_(), den_(T(1)) {}
  explicit RatFun(Poly<T> num) : num_(std::move(num)), den_(T(1)) {}
  RatFun(Poly<T> num, Poly<T> den) : num_(std::move(num)), den_(std::move(den)) {
    check(!den_.is_zero(), errc::zero_denominator, "rational function with zero denominator");
    reduce();
  }

  const Poly<T>& num() const { return num_; }
  const Poly<T>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }
  Poly<T> as_polynomial() const { return (T(1) / den_.coeff(0)) * num_; }

  friend RatFun operator+(const RatFun& a, const RatFun& b) {
    return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  RatFun operator-() const { return RatFun(-num_, den_, no_reduce{}); }
  friend RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }
  friend RatFun operator*(const RatFun& a, const RatFun& b) {
    return RatFun(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFun operator/(const RatFun& a, const RatFun& b) {
    check(!b.num_.is_zero(), errc::zero_denominator, "division by zero rational function");
    return RatFun(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend RatFun operator*(const T& s, const RatFun& a) { return RatFun(s * a.num_, a.den_, no_reduce{}); }
  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
  bool operator==(const RatFun& o) const { return (num_ * o.den_ - o.num_ * den_).is_zero(); }

  RatFun derivative() const {
    return RatFun(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

  template <class V>
  V eval(const V& x) const {
    return num_.template eval<V>(x) / den_.template eval<V>(x);
  }

 private:
  struct no_reduce {};
  RatFun(Poly<T> n, Poly<T> d, no_reduce) : num_(std::move(n)), den_(std::move(d)) {}
  void reduce() {
    if constexpr (field_like) {
      if constexpr (field_traits<T>::is_exact) {
        if (num_.is_zero()) {
          den_ = Poly<T>(T(1));
          return;
        }
        Poly<T> g = Poly<T>::gcd(num_, den_);
        if (g.degree() > 0) {
          num_ = num_ / g;
          den_ = den_ / g;
        }
        T lead = den_.leading();
        num_ = (T(1) / lead) * num_;
        den_ = (T(1) / lead) * den_;
      }
    }
  }
  static constexpr bool field_like = requires(T v) { field_traits<T>::is_exact; };
  Poly<T> num_;
  Poly<T> den_;
};

// --- local charts -----------------------------------------------------------

enum class ChartKind { finite_reg, finite_sqrt, inf_reg, inf_sqrt };

inline bool chart_at_infinity(ChartKind k) { return k == ChartKind::inf_reg || k == ChartKind::inf_sqrt; }
inline bool chart_half_step(ChartKind k) { return k == ChartKind::finite_sqrt || k == ChartKind::inf_sqrt; }

// x-exponent of chart-variable power e, in half-integer units (i.e. 2*exponent).
inline int x_exponent_doubled(ChartKind k, int e) {
  switch (k) {
    case ChartKind::finite_reg: return 2 * e;
    case ChartKind::finite_sqrt: return e;
    case ChartKind::inf_reg: return -2 * e;
    case ChartKind::inf_sqrt: return -e;
  }
  return 0;
}

template <class F>
struct Chart {
  ChartKind kind = ChartKind::finite_reg;
  F center{0};  // ignored at infinity

  bool operator==(const Chart& o) const {
    return kind == o.kind && is_zero_v(F(center - o.center));
  }
};

// A Laurent/Puiseux expansion attached to a chart. `series` is an integer-
// exponent Laurent series in the chart variable v, where
//   finite_reg : x = center + v        finite_sqrt : x = center + v^2
//   inf_reg    : x = 1/v               inf_sqrt    : x = 1/v^2
template <class F>
struct FracSeries {
  Chart<F> chart;
  Series<F> series;

  // leading x-exponent in half-integer units (2*exponent)
  int lead_x2() const { return x_exponent_doubled(chart.kind, series.valuation()); }
};

// x as a series in the chart variable, to order `ord`.
template <class F>
Series<F> chart_x_series(const Chart<F>& ch, int ord) {
  switch (ch.kind) {
    case ChartKind::finite_reg: {
      auto s = Series<F>::monomial(F(1), 1, ord);
      s.set_coeff(0, ch.center);
      return s;
    }
    case ChartKind::finite_sqrt: {
      auto s = Series<F>::monomial(F(1), 2, ord);
      s.set_coeff(0, ch.center);
      return s;
    }
    case ChartKind::inf_reg: return Series<F>::monomial(F(1), -1, ord);
    case ChartKind::inf_sqrt: return Series<F>::monomial(F(1), -2, ord);
  }
  return Series<F>::zero(ord);
}

// dx/dv as a series in the chart variable.
template <class F>
Series<F> chart_dx_series(const Chart<F>& ch, int ord) {
  return chart_x_series<F>(ch, ord + 2).derivative().truncated(ord);
}

namespace detail {
template <class F>
Series<F> poly_in_chart(const Poly<F>& p, const Chart<F>& ch, int ord) {
  // Evaluate p(x(v)) as a Laurent series in v.
  Series<F> acc = Series<F>::zero(ord);
  if (p.is_zero()) return acc;
  switch (ch.kind) {
    case ChartKind::finite_reg:
    case ChartKind::finite_sqrt: {
      int step = ch.kind == ChartKind::finite_reg ? 1 : 2;
      // Taylor coefficients around center via repeated synthetic division.
      Poly<F> q = p;
      int maxk = ord / step + 1;
      for (int k = 0; k <= maxk && !q.is_zero(); ++k) {
        // q(center) is the k-th Taylor coefficient of the original p
        F c = q(ch.center);
        if (k * step < ord) acc.set_coeff(k * step, c);
        // divide (q - c) by (x - center)
        F carry(0);
        std::vector<F> nc(q.coeffs().size() > 0 ? q.coeffs().size() - 1 : 0, F(0));
        for (size_t i = q.coeffs().size(); i-- > 1;) {
          carry = q.coeff(static_cast<int>(i)) + carry * ch.center;
          nc[i - 1] = carry;
        }
        q = Poly<F>(std::move(nc));
      }
      return acc;
    }
    case ChartKind::inf_reg:
    case ChartKind::inf_sqrt: {
      int step = ch.kind == ChartKind::inf_reg ? 1 : 2;
      int d = p.degree();
      Series<F> s = Series<F>::zero(ord);
      for (int e = 0; e <= d; ++e) {
        int ve = -e * step;
        if (ve < ord && !is_zero_v(p.coeff(e))) s.set_coeff(ve, p.coeff(e));
      }
      return s;
    }
  }
  return acc;
}
}  // namespace detail

// Expansion of a rational function in a local chart, with `terms` known
// coefficients starting at the leading exponent (exact coefficients in exact
// mode). `allow_half` gates the sqrt charts: half-integer steps only make
// sense at ramification points / at infinity with n_inf = 1, which the caller
// certifies.
template <class F>
FracSeries<F> expand_at(const RatFun<F>& f, const Chart<F>& ch, int terms, bool allow_half = false) {
  if (chart_half_step(ch.kind))
    check(allow_half, errc::step_mismatch, "half-integer step at an ordinary point");
  check(!f.den().is_zero(), errc::zero_denominator, "expand_at on 0/0");
  // generous working order, then trim
  int guard = 2 * (std::max(f.num().degree(), f.den().degree()) + 2) + terms + 4;
  Series<F> n = detail::poly_in_chart<F>(f.num(), ch, guard);
  Series<F> d = detail::poly_in_chart<F>(f.den(), ch, guard);
  check(!d.compressed().known_zero(), errc::zero_denominator, "denominator vanishes identically");
  Series<F> q = n * d.inverse();
  q = q.compressed();
  FracSeries<F> out;
  out.chart = ch;
  out.series = q.truncated(q.valuation() + terms);
  return out;
}

}  // namespace trq

#endif
