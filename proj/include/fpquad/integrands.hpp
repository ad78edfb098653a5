#pragma once

// Integrands with exact derivative and singularity metadata, used by the
// test suites and the CLI reference studies.

#include <cmath>
#include <complex>
#include <vector>

#include "fpquad/model.hpp"

namespace fpquad::integrands {

inline constexpr int kKnownDerivatives = 16;

/// f(z) = eᶻ; every derivative at 0 is 1, no singularities.
inline Integrand exponential() {
  return Integrand([](Complex z) { return std::exp(z); }, true, std::vector<Complex>(kKnownDerivatives, 1.0),
                   std::vector<Complex>{});
}

/// f(z) = 1/(1+z); f⁽ᵏ⁾(0) = (−1)ᵏ k!, simple pole at −1.
inline Integrand reciprocal() {
  std::vector<Complex> derivs(kKnownDerivatives);
  double fact = 1.0;
  for (int k = 0; k < kKnownDerivatives; ++k) {
    if (k > 0) fact *= k;
    derivs[k] = (k % 2 == 0 ? 1.0 : -1.0) * fact;
  }
  return Integrand([](Complex z) { return 1.0 / (1.0 + z); }, true, std::move(derivs), std::vector<Complex>{-1.0});
}

inline Integrand constant(double c) {
  std::vector<Complex> derivs(kKnownDerivatives, 0.0);
  derivs[0] = c;
  return Integrand([c](Complex) { return Complex(c); }, true, std::move(derivs), std::vector<Complex>{});
}

/// f(z) = zᵏ.
inline Integrand monomial(int power) {
  std::vector<Complex> derivs(kKnownDerivatives, 0.0);
  if (power < kKnownDerivatives) {
    double fact = 1.0;
    for (int j = 2; j <= power; ++j) fact *= j;
    derivs[power] = fact;
  }
  return Integrand(
      [power](Complex z) {
        Complex r = 1.0;
        for (int j = 0; j < power; ++j) r *= z;
        return r;
      },
      true, std::move(derivs), std::vector<Complex>{});
}

}  // namespace fpquad::integrands
