#ifndef TRQUANT_SYMBOLIC_HPP
#define TRQUANT_SYMBOLIC_HPP

// Small sparse multivariate polynomial / rational-expression layer used by
// the Painleve and Lax modules: times, Darboux coordinates, hbar and opaque
// transcendental constants (A-coefficients, log Z derivatives) are symbols;
// identities are decided by cross-multiplied polynomial subtraction.

#include <map>
#include <string>
#include <vector>

#include "trquant/errors.hpp"
#include "trquant/fields.hpp"

namespace trq {

namespace symreg {
inline std::vector<std::string>& names() {
  static std::vector<std::string> v;
  return v;
}
inline std::map<std::string, int>& index() {
  static std::map<std::string, int> m;
  return m;
}
}  // namespace symreg

inline int sym(const std::string& name) {
  auto& idx = symreg::index();
  auto it = idx.find(name);
  if (it != idx.end()) return it->second;
  int id = static_cast<int>(symreg::names().size());
  symreg::names().push_back(name);
  idx.emplace(name, id);
  return id;
}
inline const std::string& sym_name(int id) { return symreg::names().at(static_cast<size_t>(id)); }

// Monomial: sorted (symbol, exponent) pairs, exponents > 0.
struct Mono {
  std::vector<std::pair<int, int>> f;

  int degree_in(int id) const {
    for (const auto& [s, e] : f)
      if (s == id) return e;
    return 0;
  }
  int total_degree() const {
    int d = 0;
    for (const auto& [s, e] : f) d += e;
    return d;
  }
  bool operator<(const Mono& o) const { return f < o.f; }
  bool operator==(const Mono& o) const { return f == o.f; }

  static Mono unit() { return {}; }
  static Mono var(int id, int e = 1) {
    Mono m;
    if (e != 0) m.f.push_back({id, e});
    return m;
  }
  friend Mono operator*(const Mono& a, const Mono& b) {
    Mono m;
    size_t i = 0, j = 0;
    while (i < a.f.size() || j < b.f.size()) {
      if (j == b.f.size() || (i < a.f.size() && a.f[i].first < b.f[j].first)) m.f.push_back(a.f[i++]);
      else if (i == a.f.size() || b.f[j].first < a.f[i].first) m.f.push_back(b.f[j++]);
      else {
        m.f.push_back({a.f[i].first, a.f[i].second + b.f[j].second});
        ++i, ++j;
      }
    }
    return m;
  }
  // divide by id^e; caller guarantees divisibility
  Mono without(int id, int e) const {
    Mono m;
    for (const auto& [s, k] : f) {
      if (s == id) {
        if (k - e > 0) m.f.push_back({s, k - e});
      } else {
        m.f.push_back({s, k});
      }
    }
    return m;
  }
};

class SymPoly {
 public:
  SymPoly() {}
  explicit SymPoly(const Rat& c) {
    if (c != 0) t_[Mono::unit()] = c;
  }
  static SymPoly var(int id, int e = 1) {
    SymPoly p;
    p.t_[Mono::var(id, e)] = 1;
    return p;
  }
  static SymPoly term(const Rat& c, const Mono& m) {
    SymPoly p;
    if (c != 0) p.t_[m] = c;
    return p;
  }

  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.f.empty()); }
  Rat constant_value() const {
    check(is_constant(), errc::internal, "SymPoly not constant");
    return t_.empty() ? Rat(0) : t_.begin()->second;
  }
  const std::map<Mono, Rat>& terms() const { return t_; }
  size_t size() const { return t_.size(); }

  friend SymPoly operator+(const SymPoly& a, const SymPoly& b) {
    SymPoly p = a;
    for (const auto& [m, c] : b.t_) p.add_term(m, c);
    return p;
  }
  SymPoly operator-() const {
    SymPoly p;
    for (const auto& [m, c] : t_) p.t_[m] = -c;
    return p;
  }
  friend SymPoly operator-(const SymPoly& a, const SymPoly& b) { return a + (-b); }
  friend SymPoly operator*(const SymPoly& a, const SymPoly& b) {
    SymPoly p;
    for (const auto& [ma, ca] : a.t_)
      for (const auto& [mb, cb] : b.t_) p.add_term(ma * mb, ca * cb);
    return p;
  }
  friend SymPoly operator*(const Rat& s, const SymPoly& a) {
    SymPoly p;
    if (s != 0)
      for (const auto& [m, c] : a.t_) p.t_[m] = s * c;
    return p;
  }
  SymPoly& operator+=(const SymPoly& o) { return *this = *this + o; }
  SymPoly& operator-=(const SymPoly& o) { return *this = *this - o; }
  SymPoly& operator*=(const SymPoly& o) { return *this = *this * o; }
  bool operator==(const SymPoly& o) const { return t_ == o.t_; }

  SymPoly pow(int n) const {
    SymPoly acc(Rat(1));
    for (int i = 0; i < n; ++i) acc *= *this;
    return acc;
  }

  int degree_in(int id) const {
    int d = 0;
    for (const auto& [m, c] : t_) d = std::max(d, m.degree_in(id));
    return d;
  }
  // coefficient of id^e (a polynomial in the remaining symbols)
  SymPoly coeff_in(int id, int e) const {
    SymPoly p;
    for (const auto& [m, c] : t_)
      if (m.degree_in(id) == e) p.add_term(m.without(id, e), c);
    return p;
  }
  bool depends_on(int id) const { return degree_in(id) > 0; }

  SymPoly derivative(int id) const {
    SymPoly p;
    for (const auto& [m, c] : t_) {
      int e = m.degree_in(id);
      if (e > 0) p.add_term(m.without(id, 1), c * e);
    }
    return p;
  }

  Rat content() const {
    // gcd of coefficients (positive), for normalization
    Int g = 0;
    Int den_l = 1;
    for (const auto& [m, c] : t_) {
      g = gcd(g, rat_num(c) < 0 ? Int(-rat_num(c)) : rat_num(c));
      den_l = lcm(den_l, rat_den(c));
    }
    if (g == 0) return 1;
    return Rat(g) / Rat(den_l);
  }

  template <class F>
  F eval(const std::map<int, F>& vals) const {
    F acc(0);
    for (const auto& [m, c] : t_) {
      F t = from_rat<F>(c);
      for (const auto& [s, e] : m.f) {
        auto it = vals.find(s);
        check(it != vals.end(), errc::missing_derivative,
              "no value bound for symbol " + sym_name(s));
        for (int k = 0; k < e; ++k) t *= it->second;
      }
      acc += t;
    }
    return acc;
  }

  std::string str() const {
    if (t_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : t_) {
      if (!out.empty()) out += " + ";
      out += c.str();
      for (const auto& [s, e] : m.f) {
        out += "*" + sym_name(s);
        if (e > 1) out += "^" + std::to_string(e);
      }
    }
    return out;
  }

 private:
  void add_term(const Mono& m, const Rat& c) {
    if (c == 0) return;
    auto it = t_.find(m);
    if (it == t_.end()) t_.emplace(m, c);
    else {
      it->second += c;
      if (it->second == 0) t_.erase(it);
    }
  }
  std::map<Mono, Rat> t_;
};

class SymRat {
 public:
  SymRat() : num_(), den_(Rat(1)) {}
  SymRat(const Rat& c) : num_(c), den_(Rat(1)) {}
  SymRat(SymPoly n) : num_(std::move(n)), den_(Rat(1)) {}
  SymRat(SymPoly n, SymPoly d) : num_(std::move(n)), den_(std::move(d)) {
    check(!den_.is_zero(), errc::zero_denominator, "symbolic division by zero");
    normalize();
  }
  static SymRat var(int id, int e = 1) { return SymRat(SymPoly::var(id, e)); }

  const SymPoly& num() const { return num_; }
  const SymPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  friend SymRat operator+(const SymRat& a, const SymRat& b) {
    if (a.den_ == b.den_) return SymRat(a.num_ + b.num_, a.den_);
    return SymRat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  SymRat operator-() const {
    SymRat r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend SymRat operator-(const SymRat& a, const SymRat& b) { return a + (-b); }
  friend SymRat operator*(const SymRat& a, const SymRat& b) {
    return SymRat(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend SymRat operator/(const SymRat& a, const SymRat& b) {
    check(!b.num_.is_zero(), errc::zero_denominator, "symbolic division by zero");
    return SymRat(a.num_ * b.den_, a.den_ * b.num_);
  }
  SymRat& operator+=(const SymRat& o) { return *this = *this + o; }
  SymRat& operator-=(const SymRat& o) { return *this = *this - o; }
  SymRat& operator*=(const SymRat& o) { return *this = *this * o; }
  bool operator==(const SymRat& o) const { return (num_ * o.den_ - o.num_ * den_).is_zero(); }

  SymRat derivative(int id) const {
    return SymRat(num_.derivative(id) * den_ - num_ * den_.derivative(id), den_ * den_);
  }

  template <class F>
  F eval(const std::map<int, F>& vals) const {
    return num_.eval(vals) / den_.eval(vals);
  }

  std::string str() const {
    if (den_.is_constant() && den_.constant_value() == 1) return num_.str();
    return "(" + num_.str() + ") / (" + den_.str() + ")";
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = SymPoly(Rat(1));
      return;
    }
    Rat cn = num_.content(), cd = den_.content();
    if (cd != 0 && cd != 1) {
      num_ = (1 / cd) * num_;
      den_ = (1 / cd) * den_;
    }
    (void)cn;
  }
  SymPoly num_;
  SymPoly den_;
};

// Substitute symbol -> rational expression, everywhere.
inline SymRat subst(const SymPoly& p, int id, const SymRat& repl) {
  // Horner in id
  int d = p.degree_in(id);
  SymRat acc = SymRat(p.coeff_in(id, d));
  for (int e = d - 1; e >= 0; --e) acc = acc * repl + SymRat(p.coeff_in(id, e));
  return acc;
}
inline SymRat subst(const SymRat& r, int id, const SymRat& repl) {
  return subst(r.num(), id, repl) / subst(r.den(), id, repl);
}
inline SymRat subst(const SymRat& r, const std::map<int, SymRat>& repl) {
  SymRat acc = r;
  for (const auto& [id, v] : repl) acc = subst(acc, id, v);
  return acc;
}

// Reduce all occurrences of a^k (k >= 2) via the algebraic relation
// a^2 = rel, where rel has a-degree <= 1. Result has a-degree <= 1 in both
// numerator and denominator.
inline SymRat reduce_quadratic(const SymRat& r, int a, const SymRat& rel) {
  check(rel.den().degree_in(a) == 0, errc::internal, "quadratic relation denominator depends on a");
  SymRat r0 = SymRat(rel.num().coeff_in(a, 0), rel.den());
  SymRat r1 = SymRat(rel.num().coeff_in(a, 1), rel.den());
  auto reduce_poly = [&](const SymPoly& p) -> SymRat {
    int d = p.degree_in(a);
    // a^k = alpha_k + beta_k * a, canonical
    SymRat alpha(Rat(1)), beta(Rat(0));
    SymRat acc = SymRat(p.coeff_in(a, 0));
    for (int k = 1; k <= d; ++k) {
      // multiply (alpha + beta a) by a:  beta*rel + alpha*a
      SymRat na = beta * r0;
      SymRat nb = alpha + beta * r1;
      alpha = na;
      beta = nb;
      SymRat ck = SymRat(p.coeff_in(a, k));
      acc += ck * (alpha + beta * SymRat::var(a));
    }
    return acc;
  };
  return reduce_poly(r.num()) / reduce_poly(r.den());
}

// A derivation D on the symbol algebra: D(symbol) given by table, 0 otherwise.
class Derivation {
 public:
  void set(int id, SymRat v) { d_[id] = std::move(v); }
  SymRat operator()(const SymPoly& p) const {
    SymRat acc(Rat(0));
    for (const auto& [id, dv] : d_) {
      SymPoly pd = p.derivative(id);
      if (!pd.is_zero()) acc += SymRat(pd) * dv;
    }
    return acc;
  }
  SymRat operator()(const SymRat& r) const {
    SymRat dn = (*this)(r.num());
    SymRat dd = (*this)(r.den());
    return (dn * SymRat(r.den()) - SymRat(r.num()) * dd) / (SymRat(r.den()) * SymRat(r.den()));
  }

 private:
  std::map<int, SymRat> d_;
};

}  // namespace trq

#endif
