#ifndef TRQUANT_THETA_HPP
#define TRQUANT_THETA_HPP

// Riemann theta functions with characteristics: lattice sums over
// ||k||_inf <= K with the cutoff chosen from Im tau so the dropped Gaussian
// tail is below tolerance. Derivatives up to a requested order share the
// same lattice pass.

#include <vector>

#include "trquant/errors.hpp"
#include "trquant/fields.hpp"

namespace trq {

template <class F>
class ThetaContext {
 public:
  using RT = typename field_traits<F>::real_type;

  ThetaContext(std::vector<std::vector<F>> tau, double tail_tol = 1e-14)
      : tau_(std::move(tau)), g_(static_cast<int>(tau_.size())) {
    // Im tau must be positive definite; lambda_min via Gershgorin lower bound
    // is enough for the cutoff policy at the sizes used here.
    double lmin = 1e300;
    for (int i = 0; i < g_; ++i) {
      double d = tau_[i_(i)][i_(i)].imag().template convert_to<double>();
      double off = 0;
      for (int j = 0; j < g_; ++j)
        if (j != i) off += std::abs(tau_[i_(i)][i_(j)].imag().template convert_to<double>());
      lmin = std::min(lmin, d - off);
    }
    check(lmin > 0, errc::not_positive_definite, "Im tau is not positive definite");
    // tail ~ exp(-pi lambda_min K^2)
    double k = std::sqrt(-std::log(tail_tol) / (M_PI * lmin));
    K_ = std::max(4, static_cast<int>(std::ceil(k)) + 2);
  }

  int genus() const { return g_; }
  int cutoff() const { return K_; }
  const std::vector<std::vector<F>>& tau() const { return tau_; }

  // theta(v) = sum_k e^{2 pi i k.v + pi i k.tau.k}
  F theta(const std::vector<F>& v) const { return partial(v, {}); }

  // partial derivative d^n theta / dv_{j1} ... dv_{jn}
  F partial(const std::vector<F>& v, const std::vector<int>& dirs) const {
    check(static_cast<int>(v.size()) == g_, errc::config_error, "theta argument dimension");
    F acc(0);
    std::vector<int> k(static_cast<size_t>(g_), -K_);
    F two_pi_i_v = two_pi_i<F>();
    while (true) {
      // exponent
      F e(0);
      for (int a = 0; a < g_; ++a) {
        e += F(2 * k[i_(a)]) * v[i_(a)];
        for (int b = 0; b < g_; ++b) e += F(k[i_(a)] * k[i_(b)]) * tau_[i_(a)][i_(b)];
      }
      F term = exp(two_pi_i_v * e / F(2));
      // actually: 2 pi i sum k v + pi i k tau k = (2 pi i)(sum k v + k tau k/2)
      for (int d : dirs) term *= two_pi_i_v * F(k[i_(d)]);
      acc += term;
      // advance lattice point
      int a = 0;
      while (a < g_ && k[i_(a)] == K_) {
        k[i_(a)] = -K_;
        ++a;
      }
      if (a == g_) break;
      ++k[i_(a)];
    }
    return acc;
  }

  // theta with half-integer characteristic [c1; c2] (each entry in {0, 1/2}):
  // theta[c](v) = sum_k e^{2 pi i (k+c1).(v+c2) + pi i (k+c1).tau.(k+c1)}
  F theta_char(const std::vector<F>& v, const std::vector<Rat>& c1, const std::vector<Rat>& c2) const {
    F acc(0);
    std::vector<int> k(static_cast<size_t>(g_), -K_);
    F tpi = two_pi_i<F>();
    while (true) {
      F e(0);
      for (int a = 0; a < g_; ++a) {
        F ka = F(k[i_(a)]) + from_rat<F>(c1[i_(a)]);
        e += ka * (v[i_(a)] + from_rat<F>(c2[i_(a)]));
        for (int b = 0; b < g_; ++b) {
          F kb = F(k[i_(b)]) + from_rat<F>(c1[i_(b)]);
          e += ka * kb * tau_[i_(a)][i_(b)] / F(2);
        }
      }
      acc += exp(tpi * e);
      int a = 0;
      while (a < g_ && k[i_(a)] == K_) {
        k[i_(a)] = -K_;
        ++a;
      }
      if (a == g_) break;
      ++k[i_(a)];
    }
    return acc;
  }

 private:
  static size_t i_(int i) { return static_cast<size_t>(i); }
  std::vector<std::vector<F>> tau_;
  int g_;
  int K_;
};

}  // namespace trq

#endif
