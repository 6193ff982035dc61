#ifndef TRQUANT_SERIES_HPP
#define TRQUANT_SERIES_HPP

// Truncated Laurent series in one chart variable, with explicit truncation
// order: a Series knows exactly which coefficients it is entitled to, and
// arithmetic never silently manufactures precision it does not have.
//
// Exponents are plain integers of the chart variable; half-integer x-exponents
// arise only through the chart metadata (s^2 = x - u, or xi = x^{-1/2}).

#include <algorithm>
#include <vector>

#include "trquant/errors.hpp"
#include "trquant/fields.hpp"

namespace trq {

template <class F>
class Series {
 public:
  Series() : lead_(0), ord_(0) {}
  // O(var^ord) with no known coefficients
  static Series o(int ord) {
    Series s;
    s.lead_ = ord;
    s.ord_ = ord;
    return s;
  }
  static Series zero(int ord) { return o(ord); }
  static Series constant(const F& c, int ord) { return monomial(c, 0, ord); }
  static Series one(int ord) { return constant(F(1), ord); }
  static Series monomial(const F& c, int e, int ord) {
    Series s;
    if (e >= ord) return o(ord);
    s.lead_ = e;
    s.ord_ = ord;
    s.c_.assign(static_cast<size_t>(ord - e), F(0));
    s.c_[0] = c;
    return s;
  }
  static Series from_coeffs(std::vector<F> c, int lead, int ord) {
    Series s;
    s.lead_ = lead;
    s.ord_ = ord;
    s.c_ = std::move(c);
    s.c_.resize(static_cast<size_t>(ord - lead), F(0));
    return s;
  }

  int lead() const { return lead_; }       // lowest stored exponent
  int order() const { return ord_; }       // coefficients valid for e < ord
  bool known_zero() const {
    for (const auto& v : c_)
      if (!is_zero_v(v)) return false;
    return true;
  }
  // lowest exponent with a nonzero coefficient; ord if none known
  int valuation() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (!is_zero_v(c_[i])) return lead_ + static_cast<int>(i);
    return ord_;
  }

  const F& coeff(int e) const {
    static const F zero{0};
    if (e >= ord_) fail(errc::truncation_too_low, "coefficient beyond truncation order");
    if (e < lead_) return zero;
    return c_[static_cast<size_t>(e - lead_)];
  }
  void set_coeff(int e, const F& v) {
    check(e < ord_, errc::truncation_too_low, "set beyond truncation order");
    if (e < lead_) {
      c_.insert(c_.begin(), static_cast<size_t>(lead_ - e), F(0));
      lead_ = e;
    }
    c_[static_cast<size_t>(e - lead_)] = v;
  }

  Series truncated(int new_ord) const {
    Series s;
    s.ord_ = std::min(new_ord, ord_);
    s.lead_ = std::min(lead_, s.ord_);
    s.c_.assign(c_.begin(), c_.begin() + static_cast<size_t>(std::max(0, s.ord_ - s.lead_)));
    s.c_.resize(static_cast<size_t>(s.ord_ - s.lead_), F(0));
    return s;
  }
  Series shifted(int k) const {  // multiply by var^k
    Series s = *this;
    s.lead_ += k;
    s.ord_ += k;
    return s;
  }
  Series compressed() const {  // drop leading zero coefficients
    Series s = *this;
    int v = valuation();
    if (v > s.lead_) {
      s.c_.erase(s.c_.begin(), s.c_.begin() + static_cast<size_t>(std::min(v, s.ord_) - s.lead_));
      s.lead_ = std::min(v, s.ord_);
    }
    return s;
  }

  Series operator-() const {
    Series s = *this;
    for (auto& v : s.c_) v = -v;
    return s;
  }
  friend Series operator+(const Series& a, const Series& b) {
    Series s;
    s.ord_ = std::min(a.ord_, b.ord_);
    s.lead_ = std::min({a.lead_, b.lead_, s.ord_});
    s.c_.assign(static_cast<size_t>(s.ord_ - s.lead_), F(0));
    for (int e = s.lead_; e < s.ord_; ++e) {
      F v(0);
      if (e >= a.lead_ && e < a.ord_) v += a.c_[static_cast<size_t>(e - a.lead_)];
      if (e >= b.lead_ && e < b.ord_) v += b.c_[static_cast<size_t>(e - b.lead_)];
      s.c_[static_cast<size_t>(e - s.lead_)] = v;
    }
    return s;
  }
  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }
  friend Series operator*(const Series& a, const Series& b) {
    Series s;
    // a = O(a.ord): a_tail * b_lead limits order, and vice versa
    s.ord_ = std::min(a.ord_ + b.lead_, b.ord_ + a.lead_);
    s.lead_ = std::min(a.lead_ + b.lead_, s.ord_);
    s.c_.assign(static_cast<size_t>(s.ord_ - s.lead_), F(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (is_zero_v(a.c_[i])) continue;
      int ea = a.lead_ + static_cast<int>(i);
      for (size_t j = 0; j < b.c_.size(); ++j) {
        int e = ea + b.lead_ + static_cast<int>(j);
        if (e >= s.ord_) break;
        s.c_[static_cast<size_t>(e - s.lead_)] += a.c_[i] * b.c_[j];
      }
    }
    return s;
  }
  Series& operator+=(const Series& o) { return *this = *this + o; }
  Series& operator-=(const Series& o) { return *this = *this - o; }
  Series& operator*=(const Series& o) { return *this = *this * o; }
  friend Series operator*(const F& c, const Series& a) {
    Series s = a;
    for (auto& v : s.c_) v = c * v;
    return s;
  }

  // Multiplicative inverse to matching relative order.
  Series inverse() const {
    Series a = compressed();
    check(!a.c_.empty() && !is_zero_v(a.c_[0]), errc::zero_leading_coefficient,
          "series inverse needs nonzero leading coefficient");
    int n = a.ord_ - a.lead_;  // number of known coefficients
    Series s;
    s.lead_ = -a.lead_;
    s.ord_ = s.lead_ + n;
    s.c_.assign(static_cast<size_t>(n), F(0));
    F inv0 = F(1) / a.c_[0];
    s.c_[0] = inv0;
    for (int k = 1; k < n; ++k) {
      F acc(0);
      for (int j = 1; j <= k; ++j) {
        if (static_cast<size_t>(j) < a.c_.size()) acc += a.c_[static_cast<size_t>(j)] * s.c_[static_cast<size_t>(k - j)];
      }
      s.c_[static_cast<size_t>(k)] = -inv0 * acc;
    }
    return s;
  }
  friend Series operator/(const Series& a, const Series& b) { return a * b.inverse(); }

  Series derivative() const {  // d/dvar
    Series s;
    s.ord_ = ord_ - 1;
    s.lead_ = std::min(lead_ - 1, s.ord_);
    s.c_.assign(static_cast<size_t>(s.ord_ - s.lead_), F(0));
    for (size_t i = 0; i < c_.size(); ++i) {
      int e = lead_ + static_cast<int>(i);
      if (e == 0) continue;
      if (e - 1 >= s.ord_) break;
      s.c_[static_cast<size_t>(e - 1 - s.lead_)] = from_rat<F>(Rat(e)) * c_[i];
    }
    return s;
  }
  const F& residue_coeff() const { return coeff(-1); }
  // Termwise primitive; the caller must have dealt with any var^{-1} term.
  Series integrated() const {
    check(lead_ > -1 || is_zero_v(coeff(-1)), errc::step_mismatch,
          "integrating a series with nonzero residue");
    Series s;
    s.ord_ = ord_ + 1;
    s.lead_ = lead_ + 1;
    s.c_.assign(static_cast<size_t>(s.ord_ - s.lead_), F(0));
    for (size_t i = 0; i < c_.size(); ++i) {
      int e = lead_ + static_cast<int>(i);
      if (e == -1) continue;
      s.c_[static_cast<size_t>(e + 1 - s.lead_)] = c_[i] / from_rat<F>(Rat(e + 1));
    }
    return s;
  }

  // exp of a series with valuation >= 1 (constant handled by the caller).
  Series exp_positive() const {
    check(valuation() >= 1, errc::step_mismatch, "exp needs positive valuation");
    int n = ord_;
    Series e = Series::one(n);
    Series term = Series::one(n);
    Series x = truncated(n).compressed();
    for (int k = 1; k < n; ++k) {
      term = term * x;
      Rat kf = 1;
      for (int j = 2; j <= k; ++j) kf *= j;
      e += from_rat<F>(1 / kf) * term;
      if (term.valuation() >= n) break;
    }
    return e;
  }
  // sqrt of a series whose valuation is even and leading coefficient admits
  // a square root in F.
  Series sqrt() const {
    Series a = compressed();
    check(!a.c_.empty() && !is_zero_v(a.c_[0]), errc::zero_leading_coefficient, "sqrt of zero series");
    check(a.lead_ % 2 == 0, errc::step_mismatch, "sqrt needs even valuation in this chart");
    F r0 = field_traits<F>::sqrt(a.c_[0]);
    int n = a.ord_ - a.lead_;
    std::vector<F> r(static_cast<size_t>(n), F(0));
    r[0] = r0;
    // (sum r_i)^2 = a, solve layer by layer
    for (int k = 1; k < n; ++k) {
      F acc(0);
      for (int j = 1; j < k; ++j) acc += r[static_cast<size_t>(j)] * r[static_cast<size_t>(k - j)];
      r[static_cast<size_t>(k)] = (a.c_[static_cast<size_t>(k)] - acc) / (F(2) * r0);
    }
    Series s;
    s.lead_ = a.lead_ / 2;
    s.ord_ = s.lead_ + n;
    s.c_ = std::move(r);
    return s;
  }

  // Substitute var -> c * var.
  Series rescaled(const F& c) const {
    Series s = *this;
    F p(1);
    // scale relative to exponent 0: coefficient of var^e picks up c^e
    for (int e = 0; e < s.ord_; ++e) {
      if (e >= s.lead_) s.c_[static_cast<size_t>(e - s.lead_)] *= p;
      p *= c;
    }
    if (s.lead_ < 0) {
      F ci = F(1) / c;
      p = ci;
      for (int e = -1; e >= s.lead_; --e) {
        s.c_[static_cast<size_t>(e - s.lead_)] *= p;
        p *= ci;
      }
    }
    return s;
  }

  // Substitute var -> g where g has valuation >= 1; *this must be a Taylor
  // series (lead >= 0). Horner from the top coefficient down.
  Series composed(const Series& g) const {
    check(lead_ >= 0, errc::step_mismatch, "composition needs a Taylor series");
    check(g.valuation() >= 1, errc::step_mismatch, "composition needs val(g) >= 1");
    int n = std::min(ord_, g.order());
    if (ord_ <= lead_) return Series::zero(n);
    Series acc = Series::constant(coeff(ord_ - 1), n);
    for (int e = ord_ - 2; e >= lead_; --e) acc = acc * g + Series::constant(coeff(e), n);
    for (int i = 0; i < lead_; ++i) acc = acc * g;
    return acc;
  }

  template <class V>
  V eval(const V& x) const {
    V acc(0);
    V p(1);
    for (int e = 0; e < ord_; ++e) {
      if (e >= lead_) acc += V(c_[static_cast<size_t>(e - lead_)]) * p;
      p *= x;
    }
    if (lead_ < 0) {
      V xi = V(1) / x;
      p = xi;
      for (int e = -1; e >= lead_; --e) {
        acc += V(c_[static_cast<size_t>(e - lead_)]) * p;
        p *= xi;
      }
    }
    return acc;
  }

  double max_mag() const {
    double m = 0;
    for (const auto& v : c_) m = std::max(m, mag(v));
    return m;
  }

 private:
  int lead_;
  int ord_;
  std::vector<F> c_;
};

// log(f) for a series with nonzero leading coefficient c0*var^v:
// log c0 (returned separately by the caller) + v*log(var) (tracked by the
// caller) + log(1 + tail), handled here: returns log(f / (c0 var^v)).
template <class F>
Series<F> log_reduced(const Series<F>& f) {
  Series<F> a = f.compressed();
  check(!is_zero_v(a.coeff(a.lead())), errc::zero_leading_coefficient, "log of zero series");
  Series<F> unitized = (F(1) / a.coeff(a.lead())) * a.shifted(-a.lead());
  // d log = u'/u, integrate back; constant is zero by construction
  Series<F> l = (unitized.derivative() * unitized.inverse()).integrated();
  return l;
}

}  // namespace trq

#endif
