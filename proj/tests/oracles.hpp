#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the Euler-Maclaurin evaluator.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "selfapprox/characters.hpp"

namespace oracle {

using Complex = std::complex<double>;

struct Bounded {
  Complex value;
  double bound = 0.0;  // rigorous bound on |value - exact|, excluding rounding
};

// n^{-s} for n = 1..M, shared across characters at one point.
inline std::vector<Complex> powers(Complex s, std::uint64_t M) {
  std::vector<Complex> out(M + 1);
  for (std::uint64_t n = 1; n <= M; ++n) out[n] = std::exp(-s * std::log(static_cast<double>(n)));
  return out;
}

// sum_{n >= 1} chi(n) n^{-s} for sigma > 1: exact head up to M plus, per residue
// class a, the tail sum_{k >= k0} f(k) with f(k) = (kq + a)^{-s} replaced by the
// trapezoid value int_{k0}^inf f + f(k0)/2. The trapezoid error is bounded by
// (1/12) int |f''| = |s(s+1)| q x0^{-sigma-1} / (12 (sigma+1)).
inline Bounded dirichlet_series(Complex s, const selfapprox::DirichletCharacter& chi,
                                const std::vector<Complex>& pw) {
  const std::uint64_t M = pw.size() - 1;
  const std::uint64_t q = chi.modulus();
  Bounded out;
  for (std::uint64_t n = 1; n <= M; ++n) out.value += chi(static_cast<std::int64_t>(n)) * pw[n];
  const double sigma = s.real();
  for (std::uint64_t a = 1; a <= q; ++a) {
    const Complex c = chi(static_cast<std::int64_t>(a));
    if (std::abs(c) == 0.0) continue;
    std::uint64_t k0 = M >= a ? (M - a) / q + 1 : 0;
    const double x0 = static_cast<double>(k0 * q + a);
    const double qd = static_cast<double>(q);
    const Complex f0 = std::exp(-s * std::log(x0));
    const Complex integral = x0 * f0 / (qd * (s - 1.0));
    out.value += c * (integral + 0.5 * f0);
    out.bound += std::abs(s * (s + 1.0)) * qd * std::pow(x0, -sigma - 1.0) / (12.0 * (sigma + 1.0));
  }
  return out;
}

inline Bounded dirichlet_series(Complex s, const selfapprox::DirichletCharacter& chi, std::uint64_t M) {
  return dirichlet_series(s, chi, powers(s, M));
}

}  // namespace oracle
