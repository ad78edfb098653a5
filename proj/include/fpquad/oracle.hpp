#pragma once

/**
 * @file oracle.hpp
 * @brief Reference values that do not go through the loop integral: the
 * ε-limit definition of the finite-part integral, evaluated with a
 * conventional quadrature on [ε,1], and closed forms for two test integrals.
 *
 *   F(ε) = ∫_ε¹ x⁻ⁿ f(x) dx − Σ_{k=0}^{n−2} ε^{k+1−n} f⁽ᵏ⁾(0) / (k!(n−1−k))
 *          + log ε · f⁽ⁿ⁻¹⁾(0) / (n−1)!
 *
 * F(ε) − fp∫ = −Σ_{k≥n} f⁽ᵏ⁾(0) ε^{k−n+1} / (k!(k−n+1)) is a power series in
 * ε, so polynomial extrapolation of F to ε = 0 converges quickly.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>
#include <utility>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fpquad/errors.hpp"
#include "fpquad/model.hpp"
#include "fpquad/quadrature.hpp"

namespace fpquad {

/// Globally adaptive Gauss–Kronrod (15/31) quadrature on [a,b]: the panel
/// with the largest error estimate is bisected until the summed estimate is
/// at most tol·max(1, |result|). For a > 0 the starting panels are
/// [a, 2a], [2a, 4a], ..., which suits integrands growing like x⁻ⁿ towards 0.
inline double gauss_quad(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (!(a < b)) throw InvalidParameter("gauss_quad needs a < b");
  if (!(tol > 0.0)) throw InvalidParameter("gauss_quad needs tol > 0");
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr std::size_t kMaxPanels = 2000;

  struct Panel {
    double lo, hi, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto make = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0};
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.err);
    // The single-pass estimate is reported for the rule on [-1, 1].
    p.err *= 0.5 * (hi - lo);
    return p;
  };

  std::priority_queue<Panel> panels;
  for (double lo = a; lo < b;) {
    const double hi = lo > 0.0 ? std::min(b, 2.0 * lo) : b;
    panels.push(make(lo, hi));
    lo = hi;
  }
  auto totals = [&] {
    // Re-summed from scratch so the result does not depend on bisection order.
    auto copy = panels;
    std::vector<Panel> all;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
    double value = 0.0, err = 0.0;
    for (const auto& p : all) {
      value += p.value;
      err += p.err;
    }
    return std::pair{value, err};
  };

  auto [value, err] = totals();
  while (std::isfinite(value) && err > tol * std::max(1.0, std::abs(value)) && panels.size() < kMaxPanels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    panels.push(make(worst.lo, mid));
    panels.push(make(mid, worst.hi));
    std::tie(value, err) = totals();
  }
  if (!std::isfinite(value) || err > tol * std::max(1.0, std::abs(value))) {
    std::ostringstream os;
    os << "inner quadrature on [" << a << ", " << b << "] stopped at error estimate " << err << " after "
       << panels.size() << " panels";
    throw InnerQuadratureError(os.str());
  }
  return value;
}

enum class Extrapolation {
  last_value,         ///< F at the smallest ε
  richardson_linear,  ///< 2F(ε_last) − F(ε_prev) style step on the last pair
  polynomial,         ///< Neville extrapolation through every F(ε_j)
};

struct OracleConfig {
  std::vector<double> eps_sequence = default_eps_sequence();
  double inner_tol = 1e-13;
  Extrapolation extrapolation = Extrapolation::polynomial;
  /// Allowed relative gap between the last two extrapolants.
  double stability_tol = 1e-7;

  /// ε_j = 0.45·0.8ʲ, j = 0..9. Smaller ε lose digits to the ε^{1−n}
  /// cancellation for n >= 3.
  static std::vector<double> default_eps_sequence() {
    std::vector<double> eps(10);
    for (std::size_t j = 0; j < eps.size(); ++j) eps[j] = 0.45 * std::pow(0.8, static_cast<double>(j));
    return eps;
  }

  void validate() const {
    if (eps_sequence.size() < 2) throw InvalidParameter("oracle needs at least two eps values");
    for (std::size_t j = 0; j < eps_sequence.size(); ++j) {
      const double e = eps_sequence[j];
      if (!(e > 0.0 && e < 0.5)) throw InvalidParameter("oracle eps values must lie in (0, 0.5)");
      if (j > 0 && !(e < eps_sequence[j - 1])) throw InvalidParameter("oracle eps sequence must strictly decrease");
    }
    if (!(inner_tol > 0.0)) throw InvalidParameter("inner_tol must be positive");
  }
};

struct OracleResult {
  double value = 0.0;
  /// |T_last − T_prev| of the extrapolation (or of F for last_value).
  double convergence = 0.0;
  std::vector<double> sequence;
};

/// F(ε) for real f on [ε, 1]; derivs holds f⁽ᵏ⁾(0), k = 0..n−1.
inline double fp_truncated(const Integrand& f, int n, double eps, std::span<const Complex> derivs, double inner_tol) {
  const double head = gauss_quad([&](double x) { return std::pow(x, -n) * f(x).real(); }, eps, 1.0, inner_tol);
  double singular = 0.0;
  for (int k = 0; k <= n - 2; ++k) {
    singular += std::pow(eps, k + 1 - n) * derivs[k].real() / (detail::factorial(k) * (n - 1 - k));
  }
  return head - singular + std::log(eps) * derivs[n - 1].real() / detail::factorial(n - 1);
}

/// The finite-part integral straight from its ε-limit definition.
inline OracleResult fp_limit_oracle(const Integrand& f, int n, const OracleConfig& cfg = {}) {
  if (n < 1) throw InvalidParameter("singularity order n must be >= 1");
  if (!f.real_on_interval()) throw InvalidParameter("limit oracle needs an integrand that is real on [0,1]");
  cfg.validate();
  const auto derivs = resolve_derivatives(f, n);

  OracleResult out;
  const auto& eps = cfg.eps_sequence;
  for (double e : eps) out.sequence.push_back(fp_truncated(f, n, e, derivs, cfg.inner_tol));
  const std::size_t m = eps.size();

  switch (cfg.extrapolation) {
    case Extrapolation::last_value:
      out.value = out.sequence[m - 1];
      out.convergence = std::abs(out.sequence[m - 1] - out.sequence[m - 2]);
      break;
    case Extrapolation::richardson_linear: {
      // Eliminate the O(ε) term through the last two points.
      const double e1 = eps[m - 2], e2 = eps[m - 1];
      const double f1 = out.sequence[m - 2], f2 = out.sequence[m - 1];
      out.value = (e1 * f2 - e2 * f1) / (e1 - e2);
      out.convergence = std::abs(f2 - f1);
      break;
    }
    case Extrapolation::polynomial: {
      std::vector<double> t = out.sequence;
      double previous = t[m - 1];
      for (std::size_t level = 1; level < m; ++level) {
        for (std::size_t i = m - 1; i >= level; --i) {
          t[i] = (eps[i] * t[i - 1] - eps[i - level] * t[i]) / (eps[i] - eps[i - level]);
        }
        if (level + 1 == m) out.convergence = std::abs(t[m - 1] - previous);
        previous = t[m - 1];
      }
      out.value = t[m - 1];
      break;
    }
  }

  if (!std::isfinite(out.value) || out.convergence > cfg.stability_tol * std::max(1.0, std::abs(out.value))) {
    std::ostringstream os;
    os << "eps-limit did not settle: last correction " << out.convergence << " for value " << out.value;
    throw OracleUnstable(os.str(), out.sequence);
  }
  return out;
}

/// fp∫₀¹ x⁻ⁿ eˣ dx = Σ_{k≥0, k≠n−1} 1/(k!(k−n+1)), truncated after n_terms terms.
inline double exact_exp_series(int n, int n_terms = 40) {
  if (n < 1) throw InvalidParameter("singularity order n must be >= 1");
  if (n_terms < n + 20) throw InvalidParameter("exact_exp_series needs n_terms >= n + 20");
  // Sum smallest terms first.
  double sum = 0.0;
  for (int k = n_terms - 1; k >= 0; --k) {
    if (k == n - 1) continue;
    sum += 1.0 / (detail::factorial(k) * (k - n + 1));
  }
  return sum;
}

/// fp∫₀¹ x⁻ⁿ/(1+x) dx = (−1)ⁿ {log 2 + Σ_{l=1}^{n−1} (−1)ˡ/l}.
inline double exact_reciprocal(int n) {
  if (n < 1) throw InvalidParameter("singularity order n must be >= 1");
  double s = std::numbers::ln2;
  for (int l = 1; l <= n - 1; ++l) s += (l % 2 == 0 ? 1.0 : -1.0) / l;
  return (n % 2 == 0 ? 1.0 : -1.0) * s;
}

}  // namespace fpquad
