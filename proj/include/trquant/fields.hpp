#ifndef TRQUANT_FIELDS_HPP
#define TRQUANT_FIELDS_HPP

// Scalar layer: exact rationals (GMP-backed) and configurable-precision
// binary complex floats, behind one field_traits interface so the series
// and recursion machinery can be instantiated in either mode.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/complex_adaptor.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <map>
#include <string>

#include "trquant/errors.hpp"

namespace trq {

namespace mp = boost::multiprecision;

using Int = mp::number<mp::gmp_int, mp::et_off>;
using Rat = mp::number<mp::gmp_rational, mp::et_off>;

template <unsigned Bits>
using RealBits = mp::number<mp::cpp_bin_float<Bits, mp::digit_base_2>, mp::et_off>;
template <unsigned Bits>
using ComplexBits =
    mp::number<mp::complex_adaptor<mp::cpp_bin_float<Bits, mp::digit_base_2>>, mp::et_off>;

using R128 = RealBits<128>;
using C128 = ComplexBits<128>;
using R256 = RealBits<256>;
using C256 = ComplexBits<256>;

inline Int rat_num(const Rat& q) { return numerator(q); }
inline Int rat_den(const Rat& q) { return denominator(q); }

// Exact square root of a rational; fails unless the value is a perfect square.
inline Rat sqrt_exact(const Rat& q) {
  if (q < 0) fail(errc::step_mismatch, "exact sqrt of negative rational");
  Int n = rat_num(q), d = rat_den(q);
  Int sn = sqrt(n), sd = sqrt(d);
  if (sn * sn != n || sd * sd != d)
    fail(errc::step_mismatch, "rational is not a perfect square; exact mode unavailable");
  return Rat(sn) / Rat(sd);
}

template <class F>
struct field_traits;

template <>
struct field_traits<Rat> {
  static constexpr bool is_exact = true;
  static constexpr unsigned precision_bits = 0;
  using real_type = Rat;
  static Rat from_rat(const Rat& q) { return q; }
  static double mag(const Rat& x) { return std::abs(x.convert_to<double>()); }
  static Rat sqrt(const Rat& x) { return sqrt_exact(x); }
  static bool is_zero(const Rat& x) { return x == 0; }
  static Rat conj(const Rat& x) { return x; }
};

template <unsigned Bits>
struct field_traits<ComplexBits<Bits>> {
  static constexpr bool is_exact = false;
  static constexpr unsigned precision_bits = Bits;
  using C = ComplexBits<Bits>;
  using real_type = RealBits<Bits>;
  static C from_rat(const Rat& q) {
    return C(real_type(rat_num(q))) / C(real_type(rat_den(q)));
  }
  static double mag(const C& x) { return abs(x).template convert_to<double>(); }
  static C sqrt(const C& x) { return mp::sqrt(x); }
  static bool is_zero(const C& x) { return x == C(0); }
  static C conj(const C& x) { return mp::conj(x); }
  static real_type pi() { return boost::math::constants::pi<real_type>(); }
};

template <class F>
inline F from_rat(const Rat& q) {
  return field_traits<F>::from_rat(q);
}
template <class F>
inline double mag(const F& x) {
  return field_traits<F>::mag(x);
}
template <class F>
inline bool is_zero_v(const F& x) {
  return field_traits<F>::is_zero(x);
}

template <unsigned Bits>
inline ComplexBits<Bits> imag_unit() {
  return ComplexBits<Bits>(RealBits<Bits>(0), RealBits<Bits>(1));
}
template <class F>
inline F two_pi_i() {
  constexpr unsigned B = field_traits<F>::precision_bits;
  return F(2) * F(field_traits<F>::pi()) * imag_unit<B>();
}

// ---------------------------------------------------------------------------
// LogQ: Q-linear combinations of 1, log p (p prime), and i*pi.  This is all
// the transcendence the exact genus-0 wave-function constants ever need:
// log of any nonzero rational splits over the prime factorization, with a
// fixed +i*pi branch for the sign.
struct LogQ {
  Rat rat;                      // rational part
  std::map<std::int64_t, Rat> logs;  // prime -> coefficient of log(prime)
  Rat ipi;                      // coefficient of i*pi

  LogQ() : rat(0), ipi(0) {}
  explicit LogQ(const Rat& r) : rat(r), ipi(0) {}

  static LogQ log_of(Rat a) {
    check(a != 0, errc::zero_denominator, "log of zero");
    LogQ out;
    if (a < 0) {
      out.ipi = 1;
      a = -a;
    }
    auto fold = [&out](Int v, int sign) {
      std::int64_t p = 2;
      while (v > 1) {
        if (p * p > v) {  // remainder is prime
          out.logs[v.convert_to<std::int64_t>()] += sign;
          break;
        }
        if (v % p == 0) {
          out.logs[p] += sign;
          v /= p;
        } else {
          ++p;
        }
      }
    };
    fold(rat_num(a), +1);
    fold(rat_den(a), -1);
    for (auto it = out.logs.begin(); it != out.logs.end();)
      it = (it->second == 0) ? out.logs.erase(it) : std::next(it);
    return out;
  }

  LogQ& operator+=(const LogQ& o) {
    rat += o.rat;
    ipi += o.ipi;
    for (const auto& [p, c] : o.logs) {
      Rat& v = logs[p];
      v += c;
      if (v == 0) logs.erase(p);
    }
    return *this;
  }
  LogQ& operator-=(const LogQ& o) { return *this += o * Rat(-1); }
  LogQ operator+(const LogQ& o) const {
    LogQ t = *this;
    t += o;
    return t;
  }
  LogQ operator-(const LogQ& o) const {
    LogQ t = *this;
    t -= o;
    return t;
  }
  LogQ operator*(const Rat& s) const {
    LogQ t;
    t.rat = rat * s;
    t.ipi = ipi * s;
    if (s != 0)
      for (const auto& [p, c] : logs) t.logs[p] = c * s;
    return t;
  }
  bool operator==(const LogQ& o) const { return rat == o.rat && ipi == o.ipi && logs == o.logs; }
  bool is_rational() const { return logs.empty() && ipi == 0; }

  // exp() when the result is rational: integer prime exponents, integer ipi.
  bool exp_is_rational() const {
    if (rat != 0) return false;
    if (rat_den(ipi) != 1) return false;
    for (const auto& [p, c] : logs)
      if (rat_den(c) != 1) return false;
    return true;
  }
  Rat exp_rational() const {
    check(exp_is_rational(), errc::step_mismatch, "exp(LogQ) not rational");
    Rat out = (rat_num(ipi) % 2 == 0) ? 1 : -1;
    for (const auto& [p, c] : logs) {
      Int e = rat_num(c);
      Rat base(p);
      if (e < 0) {
        base = 1 / base;
        e = -e;
      }
      for (Int k = 0; k < e; ++k) out *= base;
    }
    return out;
  }

  template <class F>
  F eval() const {
    using RT = typename field_traits<F>::real_type;
    F out = from_rat<F>(rat);
    for (const auto& [p, c] : logs) out += from_rat<F>(c) * F(log(RT(p)));
    out += from_rat<F>(ipi) * F(field_traits<F>::pi()) * imag_unit<field_traits<F>::precision_bits>();
    return out;
  }
};

}  // namespace trq

#endif
