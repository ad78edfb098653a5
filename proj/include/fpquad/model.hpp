#pragma once

/**
 * @file model.hpp
 * @brief Domain types for finite-part integrals fp∫₀¹ x⁻ⁿ f(x) dx: the
 * analytic integrand, the closed contour around [0,1], problem and result
 * records, and the contour preflight checks (winding number, mirror
 * symmetry, singularity exclusion).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fpquad/errors.hpp"

namespace fpquad {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

namespace detail {

inline std::string format_complex(Complex z, int digits = 12) {
  std::ostringstream os;
  os.precision(digits);
  const double negligible = std::pow(10.0, -digits) * std::max(1.0, std::abs(z.real()));
  os << z.real();
  if (std::abs(z.imag()) > negligible) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace detail

/// An analytic function f together with what is known about it.
///
/// `singularities` distinguishes "declared: none" (an empty list, e.g. for
/// entire functions) from "unknown" (nullopt, e.g. user expressions).
class Integrand {
 public:
  using Function = std::function<Complex(Complex)>;

  explicit Integrand(Function f, bool real_on_interval = true, std::vector<Complex> known_derivs_at_zero = {},
                     std::optional<std::vector<Complex>> singularities = std::nullopt)
      : f_(std::move(f)),
        real_on_interval_(real_on_interval),
        derivs_(std::move(known_derivs_at_zero)),
        singularities_(std::move(singularities)) {
    if (!f_) throw InvalidParameter("integrand: empty function");
  }

  Complex operator()(Complex z) const { return f_(z); }

  [[nodiscard]] bool real_on_interval() const noexcept { return real_on_interval_; }
  /// Exact values [f(0), f'(0), ...]; may be empty.
  [[nodiscard]] const std::vector<Complex>& known_derivs_at_zero() const noexcept { return derivs_; }
  [[nodiscard]] const std::optional<std::vector<Complex>>& singularities() const noexcept { return singularities_; }

 private:
  Function f_;
  bool real_on_interval_;
  std::vector<Complex> derivs_;
  std::optional<std::vector<Complex>> singularities_;
};

/// Closed curve z = φ(u), 0 <= u < period, expected to wind once around [0,1].
class Contour {
 public:
  using Map = std::function<Complex(double)>;
  using ComplexMap = std::function<Complex(Complex)>;

  /// `continuation`, when given, is φ extended to complex parameters; it is
  /// needed only for strip diagnostics.
  Contour(Map phi, Map dphi, double period, bool symmetric, ComplexMap continuation = {})
      : phi_(std::move(phi)),
        dphi_(std::move(dphi)),
        continuation_(std::move(continuation)),
        period_(period),
        symmetric_(symmetric) {
    if (!phi_ || !dphi_) throw InvalidParameter("contour: empty parameterization");
    if (!(period_ > 0.0) || !std::isfinite(period_)) throw InvalidParameter("contour: period must be positive");
  }

  [[nodiscard]] Complex phi(double u) const { return phi_(u); }
  [[nodiscard]] Complex dphi(double u) const { return dphi_(u); }
  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] bool symmetric() const noexcept { return symmetric_; }

  [[nodiscard]] bool has_continuation() const noexcept { return static_cast<bool>(continuation_); }
  [[nodiscard]] Complex phi(Complex w) const {
    if (!continuation_) throw InvalidParameter("contour: no analytic continuation of the parameterization");
    return continuation_(w);
  }

 private:
  Map phi_;
  Map dphi_;
  ComplexMap continuation_;
  double period_;
  bool symmetric_;
};

/// One finite-part integral instance fp∫₀¹ x⁻ⁿ f(x) dx with its loop contour.
class FpProblem {
 public:
  FpProblem(int n, Integrand f, Contour contour) : n_(n), f_(std::move(f)), contour_(std::move(contour)) {
    if (n_ < 1) throw InvalidParameter("singularity order n must be >= 1");
  }

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] const Integrand& f() const noexcept { return f_; }
  [[nodiscard]] const Contour& contour() const noexcept { return contour_; }

 private:
  int n_;
  Integrand f_;
  Contour contour_;
};

struct FpResult {
  /// Reported value; imaginary part is zero when `real_valued`.
  Complex value;
  /// Trapezoidal sum minus correction, before any real projection.
  Complex raw;
  bool real_valued = false;
  /// N as passed to the evaluator (the symmetric rule uses N+1 nodes).
  int n_samples = 0;
  int n_evaluations = 0;
  std::optional<double> err_estimate;
  /// |Im raw| when the value is reported as real.
  double imag_residual = 0.0;
  /// (h/2π)·Σ|terms| + Σ|correction terms|: the magnitude rounding errors scale with.
  double term_scale = 0.0;

  [[nodiscard]] double real() const noexcept { return value.real(); }
};

// ---------------------------------------------------------------------------
// Contours

/// Ellipse with foci 0 and 1: φ(u) = 1/2 + (ρ+1/ρ)/4·cos u + i(ρ−1/ρ)/4·sin u.
inline Contour ellipse_contour(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) {
    std::ostringstream os;
    os << "ellipse parameter rho must be > 1 (got " << rho << ")";
    throw InvalidParameter(os.str());
  }
  const double a = 0.25 * (rho + 1.0 / rho);
  const double b = 0.25 * (rho - 1.0 / rho);
  return Contour(
      [a, b](double u) { return Complex(0.5 + a * std::cos(u), b * std::sin(u)); },
      [a, b](double u) { return Complex(-a * std::sin(u), b * std::cos(u)); }, 2.0 * std::numbers::pi, true,
      [a, b](Complex w) { return 0.5 + a * std::cos(w) + Complex(0.0, b) * std::sin(w); });
}

inline Contour circle_contour(Complex center, double radius) {
  if (!(radius > 0.0)) throw InvalidParameter("circle radius must be positive");
  const bool symmetric = center.imag() == 0.0;
  return Contour([=](double u) { return center + radius * std::polar(1.0, u); },
                 [=](double u) { return Complex(0.0, radius) * std::polar(1.0, u); }, 2.0 * std::numbers::pi,
                 symmetric, [=](Complex w) { return center + radius * std::exp(Complex(0.0, 1.0) * w); });
}

/// Same curve traversed backwards.
inline Contour reversed(const Contour& c) {
  auto ext = c.has_continuation() ? Contour::ComplexMap([c](Complex w) { return c.phi(-w); }) : Contour::ComplexMap{};
  return Contour([c](double u) { return c.phi(-u); }, [c](double u) { return -c.dphi(-u); }, c.period(), c.symmetric(),
                 std::move(ext));
}

/// Curve shifted by `offset`. The symmetric flag survives only real shifts.
inline Contour translated(const Contour& c, Complex offset) {
  auto ext = c.has_continuation() ? Contour::ComplexMap([c, offset](Complex w) { return c.phi(w) + offset; })
                                  : Contour::ComplexMap{};
  return Contour([c, offset](double u) { return c.phi(u) + offset; }, [c](double u) { return c.dphi(u); }, c.period(),
                 c.symmetric() && offset.imag() == 0.0, std::move(ext));
}

// ---------------------------------------------------------------------------
// Preflight checks

namespace detail {

/// Trapezoid node k of M over one period, wrapped into (−P/2, P/2] so that
/// nodes k and M−k are exact negatives of each other.
inline double wrapped_node(std::size_t k, std::size_t m, double h) {
  return 2 * k <= m ? static_cast<double>(k) * h : -static_cast<double>(m - k) * h;
}

}  // namespace detail

/// (1/2πi)∮ dz/(z−point) by the n_check-node trapezoidal rule (not rounded).
inline double winding_number(const Contour& c, Complex point, int n_check) {
  if (n_check < 16) throw InvalidParameter("winding check needs n_check >= 16");
  const auto m = static_cast<std::size_t>(n_check);
  const double h = c.period() / static_cast<double>(m);
  Complex sum = 0.0;
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    const double u = detail::wrapped_node(k, m, h);
    const Complex dz = c.phi(u) - point;
    closest = std::min(closest, std::abs(dz));
    sum += c.dphi(u) / dz;
  }
  if (closest <= 1e-12) {
    throw ContourTooClose("point " + detail::format_complex(point) + " lies on the contour");
  }
  // sum·h/(2πi): the winding number is the imaginary part of sum·h/2π.
  return (sum * h / (2.0 * std::numbers::pi)).imag();
}

/// True iff the contour winds exactly once, positively, around 0, 1/2 and 1.
inline bool encloses_unit_interval(const Contour& c, int n_check = 256) {
  for (double x : {0.0, 0.5, 1.0}) {
    if (std::lround(winding_number(c, x, n_check)) != 1) return false;
  }
  return true;
}

/// Sampled test of φ(period − u) = conj φ(u).
inline bool check_symmetry(const Contour& c, int n_check = 64) {
  if (n_check < 8) throw InvalidParameter("symmetry check needs n_check >= 8");
  const double p = c.period();
  double worst = 0.0;
  double size = 0.0;
  for (int j = 0; j < n_check; ++j) {
    const double u = p * j / n_check;
    const Complex z = c.phi(u);
    size = std::max(size, std::abs(z));
    worst = std::max(worst, std::abs(c.phi(p - u) - std::conj(z)));
  }
  return worst <= 1e-13 * (1.0 + size);
}

struct AnalyticityProbe {
  bool analytic = true;
  /// Single-pole location estimate when not analytic.
  std::optional<Complex> location;
  /// max_k |m_k| / scale_k over the probed moments.
  double moment_ratio = 0.0;
};

/// Numerical test that f has no singularity inside the contour: the moments
/// (1/2πi)∮ f(z)(z−½)ᵏ dz, k = 0..3, must vanish by Cauchy's theorem. When
/// they do not, m₁/m₀ locates a dominant simple pole.
inline AnalyticityProbe probe_analyticity(const Integrand& f, const Contour& c, int n_nodes = 1024,
                                          double tol = 1e-9) {
  constexpr int kMoments = 4;
  const auto m = static_cast<std::size_t>(n_nodes);
  const double h = c.period() / static_cast<double>(m);
  std::array<Complex, kMoments> moment{};
  std::array<double, kMoments> scale{};
  for (std::size_t j = 0; j < m; ++j) {
    const double u = detail::wrapped_node(j, m, h);
    const Complex z = c.phi(u);
    Complex fz;
    try {
      fz = f(z);
    } catch (const Error& e) {
      throw EvaluationError(j, "integrand fails on the contour: " + std::string(e.what()));
    }
    if (!is_finite(fz)) {
      throw EvaluationError(j, "integrand is not finite on the contour at z = " + detail::format_complex(z));
    }
    const Complex dz = c.dphi(u);
    Complex power = 1.0;
    for (int k = 0; k < kMoments; ++k) {
      const Complex term = fz * power * dz;
      moment[k] += term;
      scale[k] += std::abs(term);
      power *= z - 0.5;
    }
  }
  AnalyticityProbe out;
  for (int k = 0; k < kMoments; ++k) {
    if (scale[k] > 0.0) out.moment_ratio = std::max(out.moment_ratio, std::abs(moment[k]) / scale[k]);
  }
  out.analytic = out.moment_ratio <= tol;
  if (!out.analytic) {
    // Common factor h/2πi cancels in the ratio.
    for (int k = 0; k + 1 < kMoments; ++k) {
      if (std::abs(moment[k]) > tol * scale[k]) {
        out.location = 0.5 + moment[k + 1] / moment[k];
        break;
      }
    }
  }
  return out;
}

struct PreflightOptions {
  int n_check = 1024;
  /// Run probe_analyticity when the integrand's singularities are unknown.
  bool probe_unknown = false;
};

/// Throws PreflightError unless the contour winds once around [0,1] and
/// excludes every declared singularity of f.
inline void preflight(const Integrand& f, const Contour& c, const PreflightOptions& opt = {}) {
  try {
    if (!encloses_unit_interval(c, opt.n_check)) {
      throw PreflightError(PreflightError::Check::winding,
                           "contour does not wind once positively around [0,1]");
    }
  } catch (const ContourTooClose& e) {
    throw PreflightError(PreflightError::Check::winding, std::string("contour touches [0,1]: ") + e.what());
  }
  if (f.singularities()) {
    for (Complex s : *f.singularities()) {
      long w = 0;
      try {
        w = std::lround(winding_number(c, s, opt.n_check));
      } catch (const ContourTooClose&) {
        throw PreflightError(PreflightError::Check::singularity,
                             "singularity at z = " + detail::format_complex(s) + " lies on the contour");
      }
      if (w != 0) {
        throw PreflightError(PreflightError::Check::singularity,
                             "singularity at z = " + detail::format_complex(s) + " is enclosed by the contour");
      }
    }
  } else if (opt.probe_unknown) {
    AnalyticityProbe probe;
    try {
      probe = probe_analyticity(f, c, opt.n_check);
    } catch (const EvaluationError& e) {
      throw PreflightError(PreflightError::Check::analyticity, e.what());
    }
    if (!probe.analytic) {
      std::string msg = "integrand is not analytic inside the contour";
      if (probe.location) msg += ": singularity enclosed near z = " + detail::format_complex(*probe.location, 6);
      throw PreflightError(PreflightError::Check::analyticity, msg);
    }
  }
}

}  // namespace fpquad
