#ifndef TRQUANT_POLY_HPP
#define TRQUANT_POLY_HPP

// Dense univariate polynomials over a commutative coefficient ring.
// The coefficient type is a field for the numeric/exact instantiations and a
// multivariate rational-expression ring for the symbolic Painleve layer.

#include <vector>

#include "trquant/errors.hpp"
#include "trquant/fields.hpp"

namespace trq {

template <class T>
class Poly {
 public:
  Poly() {}
  explicit Poly(T c) { if (!ring_zero(c)) c_.push_back(std::move(c)); }
  explicit Poly(std::vector<T> c) : c_(std::move(c)) { trim(); }
  static Poly x(int e = 1) {
    std::vector<T> c(static_cast<size_t>(e) + 1, T(0));
    c.back() = T(1);
    return Poly(std::move(c));
  }
  static Poly from_root(const T& r) { return Poly(std::vector<T>{-r, T(1)}); }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for 0
  const T& coeff(int e) const {
    static const T zero{0};
    if (e < 0 || e >= static_cast<int>(c_.size())) return zero;
    return c_[static_cast<size_t>(e)];
  }
  void set_coeff(int e, T v) {
    if (e >= static_cast<int>(c_.size())) c_.resize(static_cast<size_t>(e) + 1, T(0));
    c_[static_cast<size_t>(e)] = std::move(v);
    trim();
  }
  const std::vector<T>& coeffs() const { return c_; }
  const T& leading() const {
    check(!c_.empty(), errc::zero_denominator, "leading coefficient of zero polynomial");
    return c_.back();
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (size_t i = 0; i < c.size(); ++i) {
      if (i < a.c_.size()) c[i] += a.c_[i];
      if (i < b.c_.size()) c[i] += b.c_[i];
    }
    return Poly(std::move(c));
  }
  Poly operator-() const {
    Poly p = *this;
    for (auto& v : p.c_) v = -v;
    return p;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (ring_zero(a.c_[i])) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(c));
  }
  friend Poly operator*(const T& s, const Poly& a) {
    Poly p = a;
    for (auto& v : p.c_) v = s * v;
    p.trim();
    return p;
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  bool operator==(const Poly& o) const {
    Poly d = *this - o;
    return d.is_zero();
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<T> c(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = mul_int(c_[i], static_cast<long>(i));
    return Poly(std::move(c));
  }

  template <class V>
  V eval(const V& x) const {
    V acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + V(c_[i]);
    return acc;
  }
  T operator()(const T& x) const { return eval<T>(x); }

  // Euclidean division; requires invertible leading coefficient (field use).
  static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    check(!b.is_zero(), errc::zero_denominator, "polynomial division by zero");
    q = Poly();
    r = a;
    T inv_lead = T(1) / b.leading();
    while (!r.is_zero() && r.degree() >= b.degree()) {
      int e = r.degree() - b.degree();
      T f = r.leading() * inv_lead;
      Poly t;
      t.c_.assign(static_cast<size_t>(e) + 1, T(0));
      t.c_.back() = f;
      q += t;
      r -= t * b;
    }
  }
  friend Poly operator/(const Poly& a, const Poly& b) {
    Poly q, r;
    divmod(a, b, q, r);
    check(r.is_zero(), errc::internal, "inexact polynomial division");
    return q;
  }

  static Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly q, r;
      divmod(a, b, q, r);
      a = std::move(b);
      b = std::move(r);
    }
    if (!a.is_zero()) a = (T(1) / a.leading()) * a;  // monic
    return a;
  }

  Poly pow(int n) const {
    Poly acc = Poly(T(1));
    for (int i = 0; i < n; ++i) acc *= *this;
    return acc;
  }

 private:
  static bool ring_zero(const T& v) {
    if constexpr (requires { is_zero_v(v); }) return is_zero_v(v);
    else return v.is_zero();
  }
  static T mul_int(const T& v, long k) {
    if constexpr (requires { from_rat<T>(Rat(k)); }) return from_rat<T>(Rat(k)) * v;
    else return T(Rat(k)) * v;
  }
  void trim() {
    while (!c_.empty() && ring_zero(c_.back())) c_.pop_back();
  }
  std::vector<T> c_;
};

template <class T, class U>
Poly<U> convert_poly(const Poly<T>& p) {
  std::vector<U> c;
  c.reserve(p.coeffs().size());
  for (const auto& v : p.coeffs()) c.push_back(U(v));
  return Poly<U>(std::move(c));
}

inline Poly<Rat> poly_from_rats(const std::vector<Rat>& c) { return Poly<Rat>(c); }

template <class F>
Poly<F> poly_cast(const Poly<Rat>& p) {
  std::vector<F> c;
  c.reserve(p.coeffs().size());
  for (const auto& v : p.coeffs()) c.push_back(from_rat<F>(v));
  return Poly<F>(std::move(c));
}

}  // namespace trq

#endif
