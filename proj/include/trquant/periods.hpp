#ifndef TRQUANT_PERIODS_HPP
#define TRQUANT_PERIODS_HPP

// Torelli marking realized as explicit contours, A/B periods, the normalized
// period matrix, and the Abel map. Float mode.

#include <vector>

#include "trquant/contour.hpp"

namespace trq {

template <class F>
class MarkedCurve {
 public:
  MarkedCurve(const CurveGeometry<F>& c, TorelliMarking mk) : c_(c), mk_(std::move(mk)) {
    build();
  }
  // default marking: consecutive cuts in the sorted branch-point order
  explicit MarkedCurve(const CurveGeometry<F>& c) : c_(c) {
    int g = c.genus();
    for (int j = 0; j < g; ++j) mk_.cuts.push_back({2 * j, 2 * j + 1});
    for (int j = 0; j < g; ++j) mk_.bridges.push_back({2 * j + 1, 2 * j + 2});
    build();
  }

  const CurveGeometry<F>& curve() const { return c_; }
  const TorelliMarking& marking() const { return mk_; }
  int genus() const { return c_.genus(); }
  const Contour<F>& a_cycle(int j) const { return a_.at(static_cast<size_t>(j)); }
  const Contour<F>& b_cycle(int j) const { return b_.at(static_cast<size_t>(j)); }

  // integral of (g(x) + h(x)/Y) dx over a cycle
  F cycle_integral(const Contour<F>& ct, const std::function<F(const F&, const F&)>& f,
                   double tol = 1e-26) const {
    return contour_integral<F>(c_, ct, f, tol);
  }

  // epsilon_j = oint_{A_j} y dx (spec normalization, no 2*pi*i)
  std::vector<F> compute_periods(double tol = 1e-26) const {
    std::vector<F> eps;
    for (int j = 0; j < genus(); ++j) {
      auto v = cycle_integral(a_cycle(j), [&](const F& x, const F& Y) { return Y / c_.D().eval(x); }, tol);
      eps.push_back(v);
    }
    return eps;
  }

  // A- and B-period matrices of the odd holomorphic differentials
  // v_k = x^{k-1} dx / Y, k = 1..g.
  void holomorphic_periods(std::vector<std::vector<F>>& A, std::vector<std::vector<F>>& B,
                           double tol = 1e-26) const {
    int g = genus();
    A.assign(g, std::vector<F>(g, F(0)));
    B.assign(g, std::vector<F>(g, F(0)));
    for (int j = 0; j < g; ++j)
      for (int k = 1; k <= g; ++k) {
        auto form = [&](const F& x, const F& Y) {
          F xp(1);
          for (int e = 1; e < k; ++e) xp *= x;
          return xp / Y;
        };
        A[static_cast<size_t>(j)][static_cast<size_t>(k - 1)] = cycle_integral(a_cycle(j), form, tol);
        B[static_cast<size_t>(j)][static_cast<size_t>(k - 1)] = cycle_integral(b_cycle(j), form, tol);
      }
  }

  // Normalized period matrix tau = A^{-1} B (acting on the right basis),
  // with oint_{A_j} u_l = delta_{jl} and tau_{jl} = oint_{B_j} u_l.
  std::vector<std::vector<F>> period_matrix(double tol = 1e-26) const {
    std::vector<std::vector<F>> A, B;
    holomorphic_periods(A, B, tol);
    int g = genus();
    // u_l = sum_k C_{kl} v_k with A C = I; tau = B C
    auto C = invert(A);
    std::vector<std::vector<F>> tau(g, std::vector<F>(g, F(0)));
    for (int j = 0; j < g; ++j)
      for (int l = 0; l < g; ++l)
        for (int k = 0; k < g; ++k)
          tau[static_cast<size_t>(j)][static_cast<size_t>(l)] +=
              B[static_cast<size_t>(j)][static_cast<size_t>(k)] * C[static_cast<size_t>(k)][static_cast<size_t>(l)];
    return tau;
  }

  // coefficients C with u_l = sum_k C_{kl} x^{k-1} dx / Y
  std::vector<std::vector<F>> normalized_basis(double tol = 1e-26) const {
    std::vector<std::vector<F>> A, B;
    holomorphic_periods(A, B, tol);
    return invert(A);
  }

  // Abel map v(z) = int_{a_base}^{z} u, base = first branch point of cut 0
  // (a sigma-fixed base, so v(sigma z) = -v(z)). The end point is given by
  // (x, Y) on a chosen sheet.
  std::vector<F> abel(const F& x_end, const F& Y_end, double tol = 1e-24) const {
    auto C = normalized_basis(std::min(tol, 1e-24));
    int g = genus();
    std::vector<F> out(static_cast<size_t>(g), F(0));
    F u0 = c_.ram(base_branch_).u;
    for (int l = 0; l < g; ++l) {
      auto form = [&](const F& x, const F& Y) {
        F acc(0);
        F xp(1);
        for (int k = 1; k <= g; ++k) {
          acc += C[static_cast<size_t>(k - 1)][static_cast<size_t>(l)] * xp;
          xp *= x;
        }
        return acc / Y;
      };
      out[static_cast<size_t>(l)] =
          branch_to_point_integral<F>(c_, u0, x_end, Y_end, form, tol);
    }
    return out;
  }
  int base_branch() const { return base_branch_; }

 private:
  static std::vector<std::vector<F>> invert(std::vector<std::vector<F>> M) {
    int n = static_cast<int>(M.size());
    std::vector<std::vector<F>> I(n, std::vector<F>(n, F(0)));
    for (int i = 0; i < n; ++i) I[static_cast<size_t>(i)][static_cast<size_t>(i)] = F(1);
    for (int col = 0; col < n; ++col) {
      int piv = col;
      double best = 0;
      for (int r = col; r < n; ++r) {
        double m = mag(M[static_cast<size_t>(r)][static_cast<size_t>(col)]);
        if (m > best) {
          best = m;
          piv = r;
        }
      }
      check(best > 0, errc::singular_period_matrix, "singular period matrix");
      std::swap(M[static_cast<size_t>(piv)], M[static_cast<size_t>(col)]);
      std::swap(I[static_cast<size_t>(piv)], I[static_cast<size_t>(col)]);
      F d = M[static_cast<size_t>(col)][static_cast<size_t>(col)];
      for (int c2 = 0; c2 < n; ++c2) {
        M[static_cast<size_t>(col)][static_cast<size_t>(c2)] /= d;
        I[static_cast<size_t>(col)][static_cast<size_t>(c2)] /= d;
      }
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
  }

  void build() {
    int g = genus();
    if (g == 0) return;
    check(static_cast<int>(mk_.cuts.size()) == g, errc::config_error,
          "marking must list g cuts");
    if (mk_.bridges.empty())
      for (int j = 0; j < g; ++j) mk_.bridges.push_back({mk_.cuts[static_cast<size_t>(j)].second,
                                                         mk_.cuts[static_cast<size_t>(j)].second + 1});
    std::vector<F> pts;
    for (const auto& rc : c_.ram()) pts.push_back(rc.u);
    std::vector<F> poles;
    for (size_t nu = 0; nu < c_.divisor().finite.size(); ++nu) poles.push_back(c_.pole_x(static_cast<int>(nu)));
    auto keep_out = [&](int i, int j) {
      std::vector<F> out = poles;
      for (int k = 0; k < static_cast<int>(pts.size()); ++k)
        if (k != i && k != j) out.push_back(pts[static_cast<size_t>(k)]);
      return out;
    };
    for (int j = 0; j < g; ++j) {
      auto [i1, i2] = mk_.cuts[static_cast<size_t>(j)];
      check(i1 >= 0 && i2 >= 0 && i1 < static_cast<int>(pts.size()) && i2 < static_cast<int>(pts.size()) && i1 != i2,
            errc::config_error, "cut indices out of range");
      a_.push_back(contour_around<F>(pts[static_cast<size_t>(i1)], pts[static_cast<size_t>(i2)], keep_out(i1, i2)));
    }
    for (int j = 0; j < g; ++j) {
      auto [i1, i2] = mk_.bridges[static_cast<size_t>(j)];
      check(i1 >= 0 && i2 >= 0 && i1 < static_cast<int>(pts.size()) && i2 < static_cast<int>(pts.size()) && i1 != i2,
            errc::config_error, "bridge indices out of range");
      b_.push_back(contour_around<F>(pts[static_cast<size_t>(i1)], pts[static_cast<size_t>(i2)], keep_out(i1, i2)));
    }
    base_branch_ = mk_.cuts[0].first;
    // orient B so that the normalized period matrix satisfies Im tau > 0
    // (the theta machinery depends on it); recorded via reversed flags
    auto tau = period_matrix(1e-18);
    double im = 0;
    for (int j = 0; j < g; ++j) im += tau[static_cast<size_t>(j)][static_cast<size_t>(j)].imag().template convert_to<double>();
    if (im < 0)
      for (auto& bc : b_) bc.reversed = true;
  }

  const CurveGeometry<F>& c_;
  TorelliMarking mk_;
  std::vector<Contour<F>> a_, b_;
  int base_branch_ = 0;
};

}  // namespace trq

#endif
