#ifndef TRQUANT_RECURSION_HPP
#define TRQUANT_RECURSION_HPP

// The residue recursion in the eta basis.
//
// Every stable omega_{h,n} is a symmetric tensor over basis indices (i, k):
// omega = sum c_{I} prod_r eta_{I_r}(z_r), where eta_{i,k} is the sigma-odd
// form with a single order-(2k+2) pole at the finite ramification point a_i
// and vanishing A-periods. The recursion residue at a_i turns into coefficient
// extraction against the local data
//   int_{sigma z}^{z} omega_{0,2}(z1, .) = 2 sum_k eta_{i,k}(z1) s^{2k+1}/(2k+1),
//   2 (omega01(z) - omega01(sigma z)) = 8 s y_i(s) ds,
// so each output coefficient is (1/(2(2k+1))) [s^{-1}] s^{2k+1} b(s)/(y x')
// with b(s) the appropriate product of local eta expansions and x'(s) the
// chart derivative (2s at finite branch points, -2s^{-3} at b_inf).

#include <set>

#include "trquant/bergman.hpp"

namespace trq {

struct EtaIdx {
  int i;  // finite ramification index
  int k;  // half-order
  bool operator<(const EtaIdx& o) const { return std::tie(i, k) < std::tie(o.i, o.k); }
  bool operator==(const EtaIdx& o) const { return i == o.i && k == o.k; }
};

using MultiIdx = std::vector<EtaIdx>;  // kept sorted

inline MultiIdx sorted_idx(MultiIdx m) {
  std::sort(m.begin(), m.end());
  return m;
}
inline MultiIdx without_position(const MultiIdx& m, size_t pos) {
  MultiIdx out;
  out.reserve(m.size() - 1);
  for (size_t i = 0; i < m.size(); ++i)
    if (i != pos) out.push_back(m[i]);
  return out;
}

template <class F>
struct Correlator {
  int h = 0, n = 0;
  std::map<MultiIdx, F> c;

  F value(const MultiIdx& sorted_key) const {
    auto it = c.find(sorted_key);
    return it == c.end() ? F(0) : it->second;
  }
  std::set<EtaIdx> index_universe() const {
    std::set<EtaIdx> u;
    for (const auto& [m, v] : c)
      for (const auto& e : m) u.insert(e);
    return u;
  }
  double max_mag() const {
    double out = 0;
    for (const auto& [m, v] : c) out = std::max(out, mag(v));
    return out;
  }
  int max_k() const {
    int out = -1;
    for (const auto& [m, v] : c)
      for (const auto& e : m) out = std::max(out, e.k);
    return out;
  }
};

template <class F>
class TREngine {
 public:
  TREngine(const CurveGeometry<F>& c, const Bergman<F>& b) : c_(c), b_(b) {
    for (int i = 0; i < c_.num_branch(); ++i) {
      int site = b_.site_of_ram(i);
      // 1/(y(s) x'(s)), the chart-correct kernel denominator
      inv_yx_.push_back((local_y(site) * b_.site(site).dx.truncated(b_.window() + 4)).inverse());
      // I_i(s) = int_{a_i}^{z(s)} omega01, odd primitive (no constant)
      iheta_.push_back((local_y(site) * Series<F>::monomial(F(2), 1, b_.window())).integrated());
    }
  }

  const CurveGeometry<F>& curve() const { return c_; }
  const Bergman<F>& bergman() const { return b_; }

  // local true-y series at a ramification site
  Series<F> local_y(int site) const {
    const auto& S = b_.site(site);
    int guard = b_.window() + 8;
    Series<F> Dser = detail::poly_in_chart<F>(c_.D(), S.chart, guard + c_.D().degree() * 4 + 4);
    return (S.Y * Dser.inverse()).truncated(guard);
  }

  // E table: eta_{a} expanded at ramification site of branch i
  Series<F> E(int i_site, const EtaIdx& a) const {
    return b_.eta_at(i_site, b_.site_of_ram(a.i), a.k);
  }

  const Correlator<F>& omega(int h, int n) {
    check(h >= 0 && n >= 1 && 2 * h - 2 + n >= 1, errc::insufficient_correlators,
          "omega(h,n) defined by recursion only for 2h-2+n >= 1");
    auto key = std::make_pair(h, n);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    // dependencies first
    if (h >= 1 && !(h == 1 && n == 1)) (void)omega(h - 1, n + 1);
    for (int h1 = 0; h1 <= h; ++h1)
      for (int n1 = 0; n1 <= n - 1; ++n1) {
        int h2 = h - h1, n2 = n - 1 - n1;
        if (2 * h1 - 2 + (n1 + 1) < 1 || 2 * h2 - 2 + (n2 + 1) < 1) continue;
        if (h1 == 0 && n1 + 1 == 2) continue;  // (0,2) handled analytically
        if (h2 == 0 && n2 + 1 == 2) continue;
        (void)omega(h1, n1 + 1);
        (void)omega(h2, n2 + 1);
      }
    if (n >= 2 && 2 * h - 2 + (n - 1) >= 1) (void)omega(h, n - 1);
    Correlator<F> out = compute(h, n);
    auto [pos, ok] = memo_.emplace(key, std::move(out));
    (void)ok;
    return pos->second;
  }

  // free energies, h >= 2; also returns the per-point residue data on demand
  F free_energy(int h) {
    check(h >= 2, errc::insufficient_correlators, "free energies defined for h >= 2");
    const auto& w = omega(h, 1);
    F acc(0);
    for (const auto& [m, v] : w.c) {
      const EtaIdx& a = m[0];
      int site = b_.site_of_ram(a.i);
      Series<F> prod = E(site, a) * iheta_[static_cast<size_t>(a.i)];
      acc += v * prod.coeff(-1);
    }
    return from_rat<F>(Rat(1) / Rat(2 - 2 * h)) * acc;
  }

  // the same value computed with the integration base point moved to z(o_s):
  // the shift contributes sum Res eta * const, which must vanish identically.
  F free_energy_base_shifted(int h, const F& shift_const) {
    const auto& w = omega(h, 1);
    F acc(0);
    for (const auto& [m, v] : w.c) {
      const EtaIdx& a = m[0];
      int site = b_.site_of_ram(a.i);
      Series<F> phi = iheta_[static_cast<size_t>(a.i)] + Series<F>::constant(shift_const, b_.window());
      acc += v * (E(site, a) * phi).coeff(-1);
    }
    return from_rat<F>(Rat(1) / Rat(2 - 2 * h)) * acc;
  }

  double symmetry_residual() const { return sym_residual_; }
  double infinite_point_residual() const { return binf_residual_; }

 private:
  struct BAccum {
    std::map<MultiIdx, Series<F>> m;
    int ord;
    explicit BAccum(int ord_) : ord(ord_) {}
    void add(const MultiIdx& key, const Series<F>& s) {
      auto it = m.find(key);
      if (it == m.end()) m.emplace(key, s);
      else it->second += s;
    }
  };

  Correlator<F> compute(int h, int n);

  void project_and_store(Correlator<F>& out, int ram_i, const MultiIdx& ext, const Series<F>& b_series,
                         const Series<F>& inv_yx) {
    Series<F> integrand = b_series * inv_yx;
    double scale = integrand.max_mag();
    // c_{(i,k)} = (1/(2(2k+1))) [s^{-2k-2}] b/(y x')
    for (int k = 0;; ++k) {
      int e = -2 * k - 2;
      if (e < integrand.valuation()) break;
      F coef = integrand.coeff(e);
      if constexpr (!field_traits<F>::is_exact) {
        if (mag(coef) <= 1e-24 * scale) continue;  // roundoff shadows of exact zeros
      }
      coef = coef * from_rat<F>(Rat(1, 2 * (2 * k + 1)));
      MultiIdx full = ext;
      full.push_back(EtaIdx{ram_i, k});
      full = sorted_idx(full);
      auto it = out.c.find(full);
      if (it == out.c.end()) {
        if (!is_zero_v(coef)) out.c.emplace(full, coef);
      } else {
        // the same sorted index reached through different slot-1 choices:
        // symmetry of the output demands agreement
        double diff = mag(F(it->second - coef));
        double scale = std::max(1.0, mag(it->second));
        if constexpr (field_traits<F>::is_exact) {
          check(diff == 0, errc::internal, "recursion output fails permutation symmetry");
        } else {
          sym_residual_ = std::max(sym_residual_, diff / scale);
          check(diff <= 1e-18 * scale, errc::internal, "recursion output fails permutation symmetry");
        }
      }
    }
  }

  const CurveGeometry<F>& c_;
  const Bergman<F>& b_;
  std::vector<Series<F>> inv_yx_;  // 1/(y_i(s) x'(s)) per finite ram point
  std::vector<Series<F>> iheta_;   // I_i(s) = odd primitive of omega01
  std::map<std::pair<int, int>, Correlator<F>> memo_;
  double sym_residual_ = 0;
  double binf_residual_ = 0;
};

template <class F>
Correlator<F> TREngine<F>::compute(int h, int n) {
  Correlator<F> out;
  out.h = h;
  out.n = n;
  int W = b_.window();

  // candidate external index universe
  std::set<EtaIdx> universe;
  auto absorb = [&](int hh, int nn) {
    if (2 * hh - 2 + nn < 1) return;
    auto it = memo_.find({hh, nn});
    if (it == memo_.end()) return;  // not a dependency of this (h, n)
    auto u = it->second.index_universe();
    universe.insert(u.begin(), u.end());
  };
  if (h >= 1 && !(h == 1 && n == 1)) absorb(h - 1, n + 1);
  for (int h1 = 0; h1 <= h; ++h1)
    for (int na = 0; na <= n - 1; ++na) absorb(h1, na + 1);
  // dual-projection indices at each ramification point
  int kmax_dual = 3 * h + n - 3 + 2;
  for (int i = 0; i < c_.num_branch(); ++i)
    for (int k = 0; k <= kmax_dual; ++k) universe.insert(EtaIdx{i, k});

  // enumerate sorted external tuples of length n-1 over the universe
  std::vector<EtaIdx> uni(universe.begin(), universe.end());
  std::vector<MultiIdx> exts;
  MultiIdx cur;
  std::function<void(size_t)> gen = [&](size_t start) {
    if (cur.size() == static_cast<size_t>(n - 1)) {
      exts.push_back(cur);
      return;
    }
    for (size_t t = start; t < uni.size(); ++t) {
      cur.push_back(uni[t]);
      gen(t);
      cur.pop_back();
    }
  };
  gen(0);

  // ramification points entering the recursion residue: all finite ones,
  // plus b_inf when it is a ramification point. The b_inf contribution has
  // no slot in the eta basis and must come out zero (the recursion output
  // has no pole there); it is computed and checked, not assumed.
  std::vector<int> rec_sites;
  for (int i = 0; i < c_.num_branch(); ++i) rec_sites.push_back(b_.site_of_ram(i));
  if (c_.inf_ramified()) rec_sites.push_back(b_.site_of_ram_inf());

  for (size_t isite = 0; isite < rec_sites.size(); ++isite) {
    int site = rec_sites[isite];
    bool at_binf = isite >= static_cast<size_t>(c_.num_branch());
    int ram_i = at_binf ? -1 : static_cast<int>(isite);
    // pairwise E-product cache at this site
    std::map<std::pair<EtaIdx, EtaIdx>, Series<F>> epp;
    auto Epair = [&](const EtaIdx& a, const EtaIdx& b) -> const Series<F>& {
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = epp.find(key);
      if (it == epp.end()) it = epp.emplace(key, E(site, key.first) * E(site, key.second)).first;
      return it->second;
    };
    auto Eone = [&](const EtaIdx& a) { return E(site, a); };

    for (const auto& ext : exts) {
      Series<F> b_series = Series<F>::o(W - 2);
      bool any = false;

      // (1) omega_{h-1, n+1}(z, sigma z, ext...)
      if (h >= 1) {
        if (h == 1 && n == 1) {
          b_series += b_.sigma_kernel(site);
          any = true;
        } else {
          const auto& low = memo_.at({h - 1, n + 1});
          auto u = low.index_universe();
          for (const auto& a : u)
            for (const auto& b2 : u) {
              MultiIdx key = ext;
              key.push_back(a);
              key.push_back(b2);
              key = sorted_idx(key);
              F v = low.value(key);
              if (is_zero_v(v)) continue;
              b_series += (-v) * Epair(a, b2);
              any = true;
            }
        }
      }

      // (2) stable x stable splittings over position subsets of ext
      int m = n - 1;
      for (int mask = 0; mask < (1 << m); ++mask) {
        MultiIdx A, B;
        for (int p = 0; p < m; ++p)
          ((mask >> p) & 1 ? A : B).push_back(ext[static_cast<size_t>(p)]);
        for (int h1 = 0; h1 <= h; ++h1) {
          int h2 = h - h1;
          int nA = static_cast<int>(A.size()) + 1, nB = static_cast<int>(B.size()) + 1;
          if (2 * h1 - 2 + nA < 1 || 2 * h2 - 2 + nB < 1) continue;
          if (h1 == 0 && nA == 2) continue;  // (0,2) factors handled in (3)/(4)
          if (h2 == 0 && nB == 2) continue;
          const auto& low1 = memo_.at({h1, nA});
          const auto& low2 = memo_.at({h2, nB});
          auto u1 = low1.index_universe();
          auto u2 = low2.index_universe();
          for (const auto& a : u1) {
            MultiIdx k1 = A;
            k1.push_back(a);
            F v1 = low1.value(sorted_idx(k1));
            if (is_zero_v(v1)) continue;
            for (const auto& b2 : u2) {
              MultiIdx k2 = B;
              k2.push_back(b2);
              F v2 = low2.value(sorted_idx(k2));
              if (is_zero_v(v2)) continue;
              b_series += (-(v1 * v2)) * Epair(a, b2);
              any = true;
            }
          }
        }
      }

      // (3) omega_{0,2}(z or sigma z, z_j) x omega_{h, n-1}: dual projection
      // leaves -2 s^{2 k_j} E_a(s), only for externals at this very point
      if (2 * h - 2 + (n - 1) >= 1 && n >= 2) {
        const auto& low = memo_.at({h, n - 1});
        auto u = low.index_universe();
        for (size_t j = 0; j < ext.size(); ++j) {
          // one term per external slot; repeated values are distinct slots
          if (ext[j].i != ram_i) continue;
          MultiIdx rest = without_position(ext, j);
          for (const auto& a : u) {
            MultiIdx key = rest;
            key.push_back(a);
            F v = low.value(sorted_idx(key));
            if (is_zero_v(v)) continue;
            Series<F> term = Series<F>::monomial(from_rat<F>(Rat(-2)), 2 * ext[j].k, W - 2) * Eone(a);
            b_series += v * term;
            any = true;
          }
        }
      }

      // (4) (0,3): both externals via omega_{0,2}
      if (h == 0 && n == 3) {
        if (ext[0].i == ram_i && ext[1].i == ram_i) {
          b_series += Series<F>::monomial(from_rat<F>(Rat(-2)), 2 * (ext[0].k + ext[1].k), W - 2);
          any = true;
        }
      }

      if (!any) continue;
      if (!at_binf) {
        project_and_store(out, ram_i, ext, b_series, inv_yx_[static_cast<size_t>(ram_i)]);
      } else {
        Series<F> inv_yx = (local_y(site) * b_.site(site).dx.truncated(b_.window() + 4)).inverse();
        Series<F> integrand = b_series * inv_yx;
        double scale = std::max(1.0, integrand.max_mag());
        for (int k = 0;; ++k) {
          int e = -2 * k - 2;
          if (e < integrand.valuation()) break;
          double m = mag(integrand.coeff(e));
          binf_residual_ = std::max(binf_residual_, m / scale);
          if constexpr (field_traits<F>::is_exact)
            check(m == 0, errc::internal, "nonzero recursion residue at the infinite point");
          else
            check(m <= 1e-18 * scale, errc::internal,
                  "nonzero recursion residue at the infinite point");
        }
      }
    }
  }
  return out;
}

}  // namespace trq

#endif
