#pragma once

/**
 * @file quadrature.hpp
 * @brief Finite-part integrals as trapezoidal sums of a loop integral.
 *
 * For f analytic inside a positively oriented closed curve C around [0,1],
 *
 *   fp∫₀¹ x⁻ⁿ f(x) dx = (1/2πi)∮_C z⁻ⁿ f(z) log(z/(z−1)) dz
 *                        − Σ_{k=0}^{n−2} f⁽ᵏ⁾(0) / (k!(n−1−k)).
 *
 * With C : z = φ(u) of period P the integrand is periodic and analytic in u,
 * so the N-point trapezoidal rule converges geometrically in N.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fpquad/errors.hpp"
#include "fpquad/model.hpp"
#include "fpquad/summation.hpp"

namespace fpquad {

enum class Rule {
  full,       ///< N nodes over the whole period
  symmetric,  ///< N+1 nodes over half the period, for mirror-symmetric problems
};

struct QuadratureConfig {
  /// Starting N.
  int n_samples = 8;
  bool adaptive = true;
  double rel_tol = 1e-12;
  int n_max = 4096;
  Summation summation = Summation::compensated;
  Rule rule = Rule::full;

  void validate() const {
    if (n_samples < 4) throw InvalidParameter("n_samples must be >= 4");
    if (n_max < n_samples) throw InvalidParameter("n_max must be >= n_samples");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidParameter("rel_tol must lie in (0, 1)");
  }
};

struct EvalOptions {
  Summation summation = Summation::compensated;
  /// Check winding number and declared singularities before summing.
  bool preflight = true;
};

// ---------------------------------------------------------------------------
// Kernel pieces

/// Distance from z to the segment [0,1].
inline double distance_to_unit_interval(Complex z) noexcept {
  if (z.real() < 0.0) return std::abs(z);
  if (z.real() > 1.0) return std::abs(z - 1.0);
  return std::abs(z.imag());
}

/// Principal log of the single ratio z/(z−1). The ratio maps ℂ∖[0,1] onto
/// ℂ∖(−∞,0], so the result is analytic off [0,1]. Never log z − log(z−1).
inline Complex principal_log_ratio(Complex z) {
  if (!(distance_to_unit_interval(z) > 1e-14)) {
    throw BranchCutError("log(z/(z-1)) requested at z = " + detail::format_complex(z) + " on the cut [0,1]");
  }
  return std::log(z / (z - 1.0));
}

namespace detail {

inline double factorial(int k) {
  double r = 1.0;
  for (int j = 2; j <= k; ++j) r *= j;
  return r;
}

inline Complex int_pow(Complex z, int e) {
  Complex result = 1.0;
  Complex base = z;
  for (unsigned k = static_cast<unsigned>(e); k != 0; k >>= 1) {
    if (k & 1u) result *= base;
    base *= base;
  }
  return result;
}

}  // namespace detail

/// Σ_{k=0}^{n−2} derivs[k] / (k!·(n−1−k)); zero for n = 1.
inline Complex correction_sum(std::span<const Complex> derivs, int n) {
  if (n < 1) throw InvalidParameter("singularity order n must be >= 1");
  if (derivs.size() < static_cast<std::size_t>(n - 1)) {
    throw MissingDerivative("correction sum for n = " + std::to_string(n) + " needs " + std::to_string(n - 1) +
                            " derivatives at 0, got " + std::to_string(derivs.size()));
  }
  Complex sum = 0.0;
  for (int k = 0; k <= n - 2; ++k) sum += derivs[k] / (detail::factorial(k) * (n - 1 - k));
  return sum;
}

/// [f(0), f'(0), ..., f^(k_max)(0)] from the Cauchy integral formula on the
/// circle |z| = radius, all orders from one set of n_nodes samples.
inline std::vector<Complex> derivatives_at_zero_cauchy(const Integrand& f, int k_max, double radius, int n_nodes) {
  if (k_max < 0) throw InvalidParameter("k_max must be >= 0");
  if (!(radius > 0.0)) throw InvalidParameter("Cauchy radius must be positive");
  if (n_nodes < 2 * (k_max + 1)) throw InvalidParameter("Cauchy rule needs n_nodes >= 2(k_max+1)");

  const auto m = static_cast<std::size_t>(n_nodes);
  std::vector<Complex> samples(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Complex z = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
    Complex fz;
    try {
      fz = f(z);
    } catch (const Error& e) {
      throw EvaluationError(j, "Cauchy node " + std::to_string(j) + ": " + e.what());
    }
    if (!is_finite(fz)) {
      throw EvaluationError(j, "Cauchy node " + std::to_string(j) + ": integrand not finite at z = " +
                                   detail::format_complex(z));
    }
    samples[j] = fz;
  }

  std::vector<Complex> derivs(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    ComplexAccumulator acc;
    for (std::size_t j = 0; j < m; ++j) {
      // e^{−2πijk/M}; index reduced mod M to keep the angle small.
      const std::size_t r = (j * static_cast<std::size_t>(k)) % m;
      acc.add(samples[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m)));
    }
    derivs[k] = acc.value() / static_cast<double>(m) * detail::factorial(k) / std::pow(radius, k);
  }
  return derivs;
}

/// min(0.25, half the distance from 0 to the nearest declared singularity).
inline double default_cauchy_radius(const Integrand& f) {
  double r = 0.25;
  if (f.singularities()) {
    for (Complex s : *f.singularities()) r = std::min(r, 0.5 * std::abs(s));
  }
  return r;
}

/// The first `count` derivatives at 0: exact ones when the integrand carries
/// enough of them, otherwise Cauchy-circle estimates.
inline std::vector<Complex> resolve_derivatives(const Integrand& f, int count) {
  if (count <= 0) return {};
  const auto& known = f.known_derivs_at_zero();
  if (known.size() >= static_cast<std::size_t>(count)) return {known.begin(), known.begin() + count};
  auto derivs = derivatives_at_zero_cauchy(f, count - 1, default_cauchy_radius(f), std::max(64, 8 * count));
  if (f.real_on_interval()) {
    for (auto& d : derivs) d = d.real();
  }
  std::copy(known.begin(), known.end(), derivs.begin());
  return derivs;
}

// ---------------------------------------------------------------------------
// Trapezoidal evaluators

namespace detail {

/// g(u) = φ(u)⁻ⁿ f(φ(u)) log(φ/(φ−1)) φ'(u), the periodic integrand.
inline Complex loop_term(const FpProblem& p, double u, std::size_t node) {
  const Complex z = p.contour().phi(u);
  const Complex kernel = principal_log_ratio(z);
  Complex fz;
  try {
    fz = p.f()(z);
  } catch (const Error& e) {
    throw EvaluationError(node, "node " + std::to_string(node) + ": " + e.what());
  }
  if (!is_finite(fz)) {
    throw EvaluationError(node, "node " + std::to_string(node) + ": integrand not finite at z = " +
                                    format_complex(z));
  }
  const Complex term = int_pow(1.0 / z, p.n()) * fz * kernel * p.contour().dphi(u);
  if (!is_finite(term)) {
    throw EvaluationError(node, "node " + std::to_string(node) + ": loop term overflows at z = " + format_complex(z));
  }
  return term;
}

/// Loop-integrand values on the M-node grid over one period, filled lazily.
/// Doubling M keeps every computed value (old node k becomes node 2k).
class TermGrid {
 public:
  TermGrid(const FpProblem& p, std::size_t m) : p_(p), m_(m), values_(m), have_(m, false) {}

  [[nodiscard]] std::size_t size() const noexcept { return m_; }
  [[nodiscard]] double step() const noexcept { return p_.contour().period() / static_cast<double>(m_); }
  [[nodiscard]] int evaluations() const noexcept { return evaluations_; }

  Complex operator[](std::size_t k) {
    if (!have_[k]) {
      values_[k] = loop_term(p_, wrapped_node(k, m_, step()), k);
      have_[k] = true;
      ++evaluations_;
    }
    return values_[k];
  }

  void refine() {
    std::vector<Complex> values(2 * m_);
    std::vector<bool> have(2 * m_, false);
    for (std::size_t k = 0; k < m_; ++k) {
      values[2 * k] = values_[k];
      have[2 * k] = have_[k];
    }
    values_ = std::move(values);
    have_ = std::move(have);
    m_ *= 2;
  }

 private:
  const FpProblem& p_;
  std::size_t m_;
  std::vector<Complex> values_;
  std::vector<bool> have_;
  int evaluations_ = 0;
};

inline double abs_sum(std::span<const Complex> v) {
  double s = 0.0;
  for (Complex c : v) s += std::abs(c);
  return s;
}

inline double correction_scale(std::span<const Complex> derivs, int n) {
  double s = 0.0;
  for (int k = 0; k <= n - 2; ++k) s += std::abs(derivs[k]) / (factorial(k) * (n - 1 - k));
  return s;
}

/// Full rule on grid.size() nodes.
inline FpResult assemble_full(const FpProblem& p, TermGrid& grid, std::span<const Complex> derivs, Summation mode) {
  const std::size_t m = grid.size();
  ComplexAccumulator acc(mode);
  double scale = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Complex g = grid[k];
    acc.add(g);
    scale += std::abs(g);
  }
  const double w = grid.step() / (2.0 * std::numbers::pi);
  const Complex s = acc.value();
  // s·h/(2πi) = (h/2π)·(Im s − i Re s)
  const Complex corr = correction_sum(derivs, p.n());
  FpResult r;
  r.raw = Complex(w * s.imag(), -w * s.real()) - corr;
  r.n_samples = static_cast<int>(m);
  r.term_scale = w * scale + correction_scale(derivs, p.n());
  r.real_valued = p.f().real_on_interval();
  if (r.real_valued) {
    r.value = r.raw.real();
    r.imag_residual = std::abs(r.raw.imag());
  } else {
    r.value = r.raw;
  }
  return r;
}

/// Folded rule: nodes 0..M/2 of the M-node grid, each interior node standing
/// in for itself and its mirror image.
inline FpResult assemble_symmetric(const FpProblem& p, TermGrid& grid, std::span<const Complex> derivs,
                                   Summation mode) {
  const std::size_t half = grid.size() / 2;
  Accumulator acc(mode);
  Accumulator endpoint_re(mode);
  double scale = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const Complex g = grid[k];
    const double weight = (k == 0 || k == half) ? 1.0 : 2.0;
    acc.add(weight * g.imag());
    scale += weight * std::abs(g);
    if (weight == 1.0) endpoint_re.add(g.real());
  }
  const double w = grid.step() / (2.0 * std::numbers::pi);
  const Complex corr = correction_sum(derivs, p.n());
  FpResult r;
  r.raw = w * acc.value() - corr.real();
  r.value = r.raw;
  r.real_valued = true;
  r.n_samples = static_cast<int>(half);
  // Re g vanishes at the two real-axis nodes for an exactly symmetric problem.
  r.imag_residual = std::abs(w * endpoint_re.value()) + std::abs(corr.imag());
  r.term_scale = w * scale + correction_scale(derivs, p.n());
  return r;
}

inline void require_symmetric(const FpProblem& p) {
  if (!p.f().real_on_interval()) {
    throw SymmetryRequirement("symmetric rule needs an integrand that is real on [0,1]");
  }
  if (!p.contour().symmetric()) {
    throw SymmetryRequirement("symmetric rule needs a contour symmetric about the real axis");
  }
}

}  // namespace detail

/// N-point trapezoidal approximation of the loop integral minus the
/// correction sum. Real-on-[0,1] integrands report the real part and keep
/// the discarded imaginary part in imag_residual.
inline FpResult fp_integral_full(const FpProblem& p, int n_samples, const EvalOptions& opt = {}) {
  if (n_samples < 4) throw InvalidParameter("full rule needs N >= 4");
  if (opt.preflight) preflight(p.f(), p.contour());
  const auto derivs = resolve_derivatives(p.f(), p.n() - 1);
  detail::TermGrid grid(p, static_cast<std::size_t>(n_samples));
  FpResult r = detail::assemble_full(p, grid, derivs, opt.summation);
  r.n_evaluations = grid.evaluations();
  return r;
}

/// Half-period rule for real integrands on mirror-symmetric contours: N+1
/// nodes at u = 0, h, ..., P/2 with h = P/(2N). Equals Re of the full rule
/// with 2N nodes.
inline FpResult fp_integral_symmetric(const FpProblem& p, int n_samples, const EvalOptions& opt = {}) {
  if (n_samples < 2) throw InvalidParameter("symmetric rule needs N >= 2");
  detail::require_symmetric(p);
  if (opt.preflight) preflight(p.f(), p.contour());
  const auto derivs = resolve_derivatives(p.f(), p.n() - 1);
  detail::TermGrid grid(p, 2 * static_cast<std::size_t>(n_samples));
  FpResult r = detail::assemble_symmetric(p, grid, derivs, opt.summation);
  r.n_evaluations = grid.evaluations();
  return r;
}

/// Doubles N from cfg.n_samples until successive iterates agree to
/// rel_tol·max(1, |I_2N|). Node values are reused across doublings.
inline FpResult fp_integral_adaptive(const FpProblem& p, const QuadratureConfig& cfg, bool run_preflight = true) {
  cfg.validate();
  if (cfg.rule == Rule::symmetric) detail::require_symmetric(p);
  if (run_preflight) preflight(p.f(), p.contour());
  const auto derivs = resolve_derivatives(p.f(), p.n() - 1);

  const bool sym = cfg.rule == Rule::symmetric;
  const std::size_t per_n = sym ? 2 : 1;
  detail::TermGrid grid(p, per_n * static_cast<std::size_t>(cfg.n_samples));
  auto evaluate = [&] {
    return sym ? detail::assemble_symmetric(p, grid, derivs, cfg.summation)
               : detail::assemble_full(p, grid, derivs, cfg.summation);
  };

  FpResult current = evaluate();
  if (!cfg.adaptive) {
    current.n_evaluations = grid.evaluations();
    return current;
  }
  double last_diff = std::numeric_limits<double>::infinity();
  while (true) {
    if (2 * current.n_samples > cfg.n_max) {
      std::ostringstream os;
      os << "no convergence to rel_tol " << cfg.rel_tol << " within N <= " << cfg.n_max;
      throw NonConvergence(os.str(), current.value, last_diff, current.n_samples);
    }
    grid.refine();
    FpResult next = evaluate();
    last_diff = std::abs(next.value - current.value);
    next.err_estimate = last_diff;
    next.n_evaluations = grid.evaluations();
    current = next;
    if (last_diff <= cfg.rel_tol * std::max(1.0, std::abs(current.value))) return current;
  }
}

}  // namespace fpquad
