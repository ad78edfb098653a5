#pragma once

/**
 * @file analysis.hpp
 * @brief Error-model diagnostics for the trapezoidal loop-integral rule.
 *
 * If φ is analytic in the strip |Im w| < d, f is analytic on φ(strip) and
 * the strip image avoids [0,1], then for any 0 < d' < d
 *
 *   |fp∫ − I_N| <= (d/π)·𝒩(f,n,d')·q/(1−q),   q = exp(−2πd'N/u_p),
 *
 *   𝒩(f,n,d') = max_{|Im w| = d'} |φ(w)⁻ⁿ f(φ(w)) log(φ(w)/(1−φ(w)))|.
 *
 * This header evaluates that bound, estimates 𝒩 by sampling the two strip
 * edges, searches for the widest admissible strip, and fits observed error
 * sequences to the model C·rᴺ.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fpquad/errors.hpp"
#include "fpquad/model.hpp"
#include "fpquad/quadrature.hpp"

namespace fpquad {

struct BoundParams {
  double d = 0.0;
  double d_prime = 0.0;
  double u_p = 0.0;
  double script_n = 0.0;

  /// d defaults to 2d'; it only moves the constant, not the rate.
  static BoundParams from(double d_prime, double u_p, double script_n) {
    return BoundParams{2.0 * d_prime, d_prime, u_p, script_n};
  }

  void validate() const {
    // d' = d is admitted: the formula is continuous there.
    if (!(d_prime > 0.0 && d_prime <= d)) throw InvalidParameter("bound needs 0 < d' <= d");
    if (!(u_p > 0.0)) throw InvalidParameter("bound needs a positive period");
    if (!(script_n >= 0.0)) throw InvalidParameter("bound needs a nonnegative strip maximum");
  }
};

inline double theoretical_bound(const BoundParams& bp, int n_samples) {
  bp.validate();
  if (n_samples < 1) throw InvalidParameter("bound needs N >= 1");
  const double q = std::exp(-2.0 * std::numbers::pi * bp.d_prime * n_samples / bp.u_p);
  return bp.d / std::numbers::pi * bp.script_n * q / (1.0 - q);
}

namespace detail {

/// Winding number of the closed polygon through `pts` around p, from summed
/// argument increments.
inline long polygon_winding(std::span<const Complex> pts, Complex p) {
  double total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Complex a = pts[k] - p;
    const Complex b = pts[(k + 1) % pts.size()] - p;
    total += std::arg(b / a);
  }
  return std::lround(total / (2.0 * std::numbers::pi));
}

/// The strip edge Im w = s as a contour (derivative by a 4th-order stencil
/// on the analytic continuation).
inline Contour strip_edge(const Contour& c, double s) {
  constexpr double kStep = 1e-3;
  auto at = [c, s](double u) { return c.phi(Complex(u, s)); };
  auto deriv = [at](double u) {
    return (8.0 * (at(u + kStep) - at(u - kStep)) - (at(u + 2 * kStep) - at(u - 2 * kStep))) / (12.0 * kStep);
  };
  return Contour(at, deriv, c.period(), false);
}

/// Throws AnalyticityViolated unless the curve φ(· + is) still winds once
/// around [0,1] and keeps every singularity of f outside.
inline void check_strip_edge(const Integrand& f, const Contour& c, double s, int n_check) {
  std::vector<Complex> pts(static_cast<std::size_t>(n_check));
  for (int k = 0; k < n_check; ++k) {
    pts[static_cast<std::size_t>(k)] = c.phi(Complex(c.period() * k / n_check, s));
  }
  std::ostringstream where;
  where << "strip edge Im w = " << s;
  for (double x : {0.0, 0.5, 1.0}) {
    if (polygon_winding(pts, x) != 1) {
      throw AnalyticityViolated(where.str() + " reaches the segment [0,1]");
    }
  }
  if (f.singularities()) {
    for (Complex sing : *f.singularities()) {
      if (polygon_winding(pts, sing) != 0) {
        throw AnalyticityViolated(where.str() + " crosses the singularity at z = " + format_complex(sing));
      }
    }
  } else {
    AnalyticityProbe probe;
    try {
      probe = probe_analyticity(f, strip_edge(c, s), n_check);
    } catch (const EvaluationError& e) {
      throw AnalyticityViolated(where.str() + ": " + e.what());
    }
    if (!probe.analytic) throw AnalyticityViolated(where.str() + " encloses a singularity of the integrand");
  }
}

}  // namespace detail

/// Sampled max of |φ(w)⁻ⁿ f(φ(w)) log(φ(w)/(1−φ(w)))| over Im w = ±d'. A
/// lower estimate of the true supremum.
inline double estimate_script_n(const Integrand& f, int n, const Contour& c, double d_prime, int grid = 256) {
  if (n < 1) throw InvalidParameter("singularity order n must be >= 1");
  if (!(d_prime > 0.0)) throw InvalidParameter("d' must be positive");
  if (grid < 16) throw InvalidParameter("grid must be >= 16");
  const int n_check = std::max(grid, 1024);
  double best = 0.0;
  for (double s : {d_prime, -d_prime}) {
    detail::check_strip_edge(f, c, s, n_check);
    for (int k = 0; k < grid; ++k) {
      const Complex z = c.phi(Complex(c.period() * k / grid, s));
      Complex fz;
      try {
        fz = f(z);
      } catch (const Error& e) {
        throw AnalyticityViolated(std::string("integrand fails on the strip edge: ") + e.what());
      }
      const double value = std::abs(detail::int_pow(1.0 / z, n) * fz * std::log(z / (1.0 - z)));
      if (!std::isfinite(value)) {
        throw AnalyticityViolated("strip maximum is not finite at z = " + detail::format_complex(z));
      }
      best = std::max(best, value);
    }
  }
  return best;
}

/// Largest d' (to within `resolution`) for which estimate_script_n succeeds,
/// found by a coarse scan followed by bisection. Capped at `d_cap`.
inline double largest_safe_d_prime(const Integrand& f, int n, const Contour& c, double d_cap = 5.0,
                                   double step = 0.05, double resolution = 1e-3, int grid = 256) {
  auto safe = [&](double d) {
    try {
      estimate_script_n(f, n, c, d, grid);
      return true;
    } catch (const AnalyticityViolated&) {
      return false;
    }
  };
  double lo = 0.0;
  double hi = d_cap;
  bool failed = false;
  for (double d = step; d <= d_cap + 1e-12; d += step) {
    if (!safe(d)) {
      hi = d;
      failed = true;
      break;
    }
    lo = d;
  }
  if (!failed) return lo;
  if (lo == 0.0) throw AnalyticityViolated("no admissible strip around the contour");
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (safe(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Decay-rate fitting

struct ErrorSample {
  int n_samples = 0;
  double error = 0.0;
  /// Errors at or below this are rounding noise and are not fitted.
  double floor = 0.0;
};

struct DecayFit {
  double rate = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

/// Least-squares line through (N, ln error) over samples with
/// floor < error < ceiling; rate = exp(slope).
inline DecayFit fit_decay_rate(std::span<const ErrorSample> samples,
                               double ceiling = std::numeric_limits<double>::infinity()) {
  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    if (std::isfinite(s.error) && s.error > s.floor && s.error > 0.0 && s.error < ceiling) {
      xs.push_back(s.n_samples);
      ys.push_back(std::log(s.error));
    }
  }
  if (xs.size() < 4) {
    throw InsufficientData("decay fit needs >= 4 samples above the error floor, got " + std::to_string(xs.size()));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InsufficientData("decay fit needs at least two distinct N");
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) throw InsufficientData("errors do not decay with N");

  DecayFit fit;
  fit.rate = std::exp(slope);
  fit.log_prefactor = my - slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points_used = static_cast<int>(xs.size());
  return fit;
}

// ---------------------------------------------------------------------------
// Convergence studies

struct StudyRow {
  int n_samples = 0;
  double approx = 0.0;
  double rel_error = 0.0;
  /// Relative rounding floor, 100·ε·max(|exact|, term_scale)/|exact|.
  double floor = 0.0;
};

/// Evaluates p at every N with the chosen rule against a known exact value.
/// The preflight runs once, before the first N.
inline std::vector<StudyRow> convergence_study(const FpProblem& p, std::span<const int> n_list, double exact,
                                               Rule rule, Summation summation = Summation::compensated) {
  preflight(p.f(), p.contour());
  const EvalOptions opt{summation, false};
  const double denom = exact != 0.0 ? std::abs(exact) : 1.0;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  std::vector<StudyRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    const FpResult r = rule == Rule::symmetric ? fp_integral_symmetric(p, n, opt) : fp_integral_full(p, n, opt);
    StudyRow row;
    row.n_samples = n;
    row.approx = r.real();
    row.rel_error = std::abs(r.real() - exact) / denom;
    row.floor = 100.0 * kEps * std::max(std::abs(exact), r.term_scale) / denom;
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<ErrorSample> to_samples(std::span<const StudyRow> rows) {
  std::vector<ErrorSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.n_samples, r.rel_error, r.floor});
  return out;
}

}  // namespace fpquad
