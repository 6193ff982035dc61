#ifndef TRQUANT_HBAR_HPP
#define TRQUANT_HBAR_HPP

// hbar-graded truncated series whose coefficients live in an arbitrary
// commutative Q-algebra V (scalars, local series, symbolic expressions,
// theta-derivative slices).

#include <map>

#include "trquant/errors.hpp"
#include "trquant/fields.hpp"

namespace trq {

template <class V>
struct algebra_traits {
  static V scale(const V& v, const Rat& r) { return from_rat<V>(r) * v; }
};

template <class V>
class HSeries {
 public:
  HSeries() : trunc_(0) {}
  explicit HSeries(int trunc) : trunc_(trunc) {}
  static HSeries term(int m, V v, int trunc) {
    HSeries h(trunc);
    h.set(m, std::move(v));
    return h;
  }

  int trunc() const { return trunc_; }  // coefficients valid for m <= trunc
  int lowest() const { return c_.empty() ? trunc_ + 1 : c_.begin()->first; }
  const std::map<int, V>& terms() const { return c_; }
  bool has(int m) const { return c_.count(m) > 0; }
  const V& at(int m) const {
    check(m <= trunc_, errc::truncation_too_low, "hbar coefficient beyond truncation");
    auto it = c_.find(m);
    check(it != c_.end(), errc::truncation_too_low, "hbar coefficient not stored");
    return it->second;
  }
  V at_or(int m, V dflt) const {
    check(m <= trunc_, errc::truncation_too_low, "hbar coefficient beyond truncation");
    auto it = c_.find(m);
    return it == c_.end() ? dflt : it->second;
  }
  void set(int m, V v) {
    check(m >= -1, errc::truncation_too_low, "hbar power below -1");
    if (m > trunc_) return;
    c_[m] = std::move(v);
  }

  friend HSeries operator+(const HSeries& a, const HSeries& b) {
    HSeries out(std::min(a.trunc_, b.trunc_));
    for (const auto& [m, v] : a.c_)
      if (m <= out.trunc_) out.c_[m] = v;
    for (const auto& [m, v] : b.c_) {
      if (m > out.trunc_) continue;
      auto it = out.c_.find(m);
      if (it == out.c_.end()) out.c_[m] = v;
      else it->second = it->second + v;
    }
    return out;
  }
  HSeries operator-() const {
    HSeries out(trunc_);
    for (const auto& [m, v] : c_) out.c_[m] = algebra_traits<V>::scale(v, Rat(-1));
    return out;
  }
  friend HSeries operator-(const HSeries& a, const HSeries& b) { return a + (-b); }
  friend HSeries operator*(const HSeries& a, const HSeries& b) {
    if (a.c_.empty() || b.c_.empty()) return HSeries(a.trunc_ + b.trunc_ + 2);
    // truncation respects the lowest powers of the other factor
    HSeries out(std::min(a.trunc_ + b.lowest_known(), b.trunc_ + a.lowest_known()));
    for (const auto& [ma, va] : a.c_)
      for (const auto& [mb, vb] : b.c_) {
        int m = ma + mb;
        if (m > out.trunc_) continue;
        V prod = va * vb;
        auto it = out.c_.find(m);
        if (it == out.c_.end()) out.c_[m] = std::move(prod);
        else it->second = it->second + prod;
      }
    return out;
  }
  HSeries scaled(const Rat& r) const {
    HSeries out(trunc_);
    for (const auto& [m, v] : c_) out.c_[m] = algebra_traits<V>::scale(v, r);
    return out;
  }
  HSeries shifted(int k) const {  // multiply by hbar^k
    HSeries out(trunc_ + k);
    for (const auto& [m, v] : c_) out.c_[m + k] = v;
    check(out.c_.empty() || out.c_.begin()->first >= -1, errc::truncation_too_low,
          "hbar power below -1 after shift");
    return out;
  }
  HSeries truncated(int t) const {
    HSeries out(std::min(t, trunc_));
    for (const auto& [m, v] : c_)
      if (m <= out.trunc_) out.c_[m] = v;
    return out;
  }

  int lowest_known() const { return c_.empty() ? 0 : c_.begin()->first; }

 private:
  int trunc_;
  std::map<int, V> c_;
};

// exp of an hbar-graded log-series, per the trans-series discipline:
// the hbar^{-1} and hbar^0 parts are returned symbolically as prefactor data,
// and only exp of the strictly positive part is expanded, through order M.
template <class V>
struct HExp {
  bool has_minus1 = false;
  V minus1{};  // exponent of the e^{S_{-1}/hbar} prefactor
  bool has_zero = false;
  V zero{};    // exponent of the e^{S_0} prefactor
  HSeries<V> tail;  // honest power series in hbar, constant term 1
};

template <class V>
HExp<V> hbar_exp(const HSeries<V>& log_series, int M) {
  check(M >= 0, errc::truncation_too_low, "hbar_exp needs M >= 0");
  check(log_series.lowest_known() >= -1 || log_series.terms().empty(), errc::truncation_too_low,
        "log series must start at hbar^{-1}");
  HExp<V> out;
  if (log_series.has(-1)) {
    out.has_minus1 = true;
    out.minus1 = log_series.at(-1);
  }
  if (log_series.has(0)) {
    out.has_zero = true;
    out.zero = log_series.at(0);
  }
  HSeries<V> pos(std::min(M, log_series.trunc()));
  for (const auto& [m, v] : log_series.terms())
    if (m >= 1) pos.set(m, v);
  // exp via the finite sum of powers; hbar^k terms need at most M factors
  HSeries<V> acc(pos.trunc());
  HSeries<V> power(pos.trunc());
  // start from 1: represented implicitly; accumulate sum_{n>=1} pos^n/n!
  Rat fact = 1;
  HSeries<V> cur = pos;
  for (int n = 1; n <= M; ++n) {
    fact *= n;
    acc = acc + cur.scaled(1 / fact);
    if (n < M) cur = cur * pos;
  }
  out.tail = acc;
  return out;
}

}  // namespace trq

#endif
