#ifndef TRQUANT_DETAIL_ROOTS_HPP
#define TRQUANT_DETAIL_ROOTS_HPP

#include <complex>
#include <vector>

#include "trquant/errors.hpp"
#include "trquant/poly.hpp"

namespace trq::detail {

// Durand-Kerner iteration; plenty for the desk-scale degrees here.
inline std::vector<std::complex<double>> roots_dk(const std::vector<std::complex<double>>& coeff) {
  int d = static_cast<int>(coeff.size()) - 1;
  check(d >= 1, errc::internal, "roots of constant polynomial");
  std::complex<double> lead = coeff.back();
  std::vector<std::complex<double>> a(coeff.size());
  for (size_t i = 0; i < coeff.size(); ++i) a[i] = coeff[i] / lead;
  std::vector<std::complex<double>> r(static_cast<size_t>(d));
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> p(1, 0);
  for (int i = 0; i < d; ++i) {
    p *= seed;
    r[static_cast<size_t>(i)] = p;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc = 0;
    for (size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
  };
  for (int it = 0; it < 400; ++it) {
    double move = 0;
    for (int i = 0; i < d; ++i) {
      std::complex<double> den = 1;
      for (int j = 0; j < d; ++j)
        if (j != i) den *= (r[static_cast<size_t>(i)] - r[static_cast<size_t>(j)]);
      std::complex<double> delta = eval(r[static_cast<size_t>(i)]) / den;
      r[static_cast<size_t>(i)] -= delta;
      move = std::max(move, std::abs(delta));
    }
    if (move < 1e-14) break;
  }
  return r;
}

// Roots of a rational-coefficient polynomial, refined to field precision by
// Newton iteration in F.
template <class F>
std::vector<F> roots(const Poly<Rat>& p) {
  std::vector<std::complex<double>> c;
  for (int e = 0; e <= p.degree(); ++e) c.push_back(p.coeff(e).convert_to<double>());
  auto rd = roots_dk(c);
  Poly<F> pf = poly_cast<F>(p);
  Poly<F> dpf = pf.derivative();
  std::vector<F> out;
  for (auto z0 : rd) {
    F z(typename field_traits<F>::real_type(z0.real()));
    z += imag_unit<field_traits<F>::precision_bits>() * F(typename field_traits<F>::real_type(z0.imag()));
    for (int it = 0; it < 64; ++it) {
      F fz = pf.eval(z);
      F dz = fz / dpf.eval(z);
      z -= dz;
      if (mag(dz) < 1e-40) break;
    }
    out.push_back(z);
  }
  return out;
}

}  // namespace trq::detail

#endif
