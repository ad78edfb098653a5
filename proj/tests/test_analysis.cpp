#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fpquad/analysis.hpp"
#include "fpquad/integrands.hpp"
#include "fpquad/oracle.hpp"

using namespace fpquad;

TEST(Bound, ReferenceValue) {
  const BoundParams bp{1.0, 1.0, 2.0 * std::numbers::pi, 1.0};
  EXPECT_NEAR(theoretical_bound(bp, 10), 1.4451902590811200849e-5, 1e-18);
}

TEST(Bound, DegenerateAndAsymptotics) {
  EXPECT_EQ(theoretical_bound(BoundParams{2.0, 1.0, 2.0 * std::numbers::pi, 0.0}, 7), 0.0);
  const double d = 1.5, sn = 3.0;
  const BoundParams bp{d, 0.75, 2.0 * std::numbers::pi, sn};
  const int n = 60;
  const double ratio = theoretical_bound(bp, 2 * n) / std::pow(theoretical_bound(bp, n), 2);
  EXPECT_NEAR(ratio, std::numbers::pi / (d * sn), 1e-9);
}

TEST(Bound, Validation) {
  EXPECT_THROW(theoretical_bound(BoundParams{1.0, 2.0, 1.0, 1.0}, 4), InvalidParameter);
  EXPECT_THROW(theoretical_bound(BoundParams{1.0, 0.0, 1.0, 1.0}, 4), InvalidParameter);
  EXPECT_THROW(theoretical_bound(BoundParams{1.0, 0.5, 1.0, 1.0}, 0), InvalidParameter);
  const BoundParams bp = BoundParams::from(0.3, 2.0, 5.0);
  EXPECT_DOUBLE_EQ(bp.d, 0.6);
}

TEST(ScriptN, FiniteAndMonotone) {
  const Contour c = ellipse_contour(10.0);
  const Integrand one = integrands::constant(1.0);
  double prev = 0.0;
  for (double d : {0.05, 0.1, 0.2}) {
    const double v = estimate_script_n(one, 1, c, d, 256);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(ScriptN, GridDoublingIsStable) {
  const Contour c = ellipse_contour(10.0);
  for (double d : {0.1, 0.5, 1.0}) {
    const double a = estimate_script_n(integrands::exponential(), 2, c, d, 256);
    const double b = estimate_script_n(integrands::exponential(), 2, c, d, 512);
    EXPECT_LT(std::abs(b - a) / b, 0.05) << d;
  }
}

TEST(ScriptN, StripCrossingPoleIsRejected) {
  // The outer strip edge around the rho ellipse is the ellipse with parameter
  // rho e^{d'}; it reaches z = -1 at parameter 3 + 2 sqrt(2).
  const double rho_pole = 3.0 + 2.0 * std::sqrt(2.0);
  EXPECT_NEAR(std::log(rho_pole / 2.0), 1.0696, 1e-4);
  EXPECT_THROW(estimate_script_n(integrands::reciprocal(), 1, ellipse_contour(2.0), std::log(rho_pole / 2.0)),
               AnalyticityViolated);

  // With rho = 5 the pole is met long before the inner edge reaches [0,1].
  const Contour c = ellipse_contour(5.0);
  const double crossing = std::log(rho_pole / 5.0);
  EXPECT_NO_THROW(estimate_script_n(integrands::reciprocal(), 1, c, crossing - 0.02));
  EXPECT_THROW(estimate_script_n(integrands::reciprocal(), 1, c, crossing + 0.02), AnalyticityViolated);

  // Same geometry with the singularity undeclared: the moment probe finds it.
  const Integrand bare([](Complex z) { return 1.0 / (1.0 + z); });
  EXPECT_NO_THROW(estimate_script_n(bare, 1, c, crossing - 0.02));
  EXPECT_THROW(estimate_script_n(bare, 1, c, crossing + 0.02), AnalyticityViolated);
}

TEST(ScriptN, InnerEdgeReachingIntervalIsRejected) {
  const Contour c = ellipse_contour(2.0);
  EXPECT_THROW(estimate_script_n(integrands::exponential(), 1, c, std::log(2.0) + 0.01), AnalyticityViolated);
}

TEST(SafeStrip, LimitedByPoleOrInterval) {
  // Pole outside rho = 2: the inner edge collapses onto [0,1] at ln 2 first.
  EXPECT_NEAR(largest_safe_d_prime(integrands::reciprocal(), 1, ellipse_contour(2.0)), std::log(2.0), 0.01);
  // Entire integrand around rho = 10: limited by ln 10.
  EXPECT_NEAR(largest_safe_d_prime(integrands::exponential(), 1, ellipse_contour(10.0)), std::log(10.0), 0.01);
  // Pole at -1 near a rho = 5 ellipse: outer edge hits it first.
  const double pole = std::log((3.0 + 2.0 * std::sqrt(2.0)) / 5.0);
  EXPECT_NEAR(largest_safe_d_prime(integrands::reciprocal(), 1, ellipse_contour(5.0)), pole, 0.01);
}

TEST(Fit, ExactGeometricData) {
  std::vector<ErrorSample> s;
  for (int n : {4, 8, 12, 16}) s.push_back({n, std::pow(0.25, n), 0.0});
  const DecayFit fit = fit_decay_rate(s);
  EXPECT_NEAR(fit.rate, 0.25, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.points_used, 4);
}

TEST(Fit, NoisyData) {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<ErrorSample> s;
  for (int n = 1; n <= 8; ++n) s.push_back({n, 3.0 * std::pow(0.024, n) * (1.0 + noise(gen)), 0.0});
  const DecayFit fit = fit_decay_rate(s);
  EXPECT_GT(fit.rate, 0.020);
  EXPECT_LT(fit.rate, 0.029);
}

TEST(Fit, FloorAndCeilingExclusion) {
  std::vector<ErrorSample> s;
  for (int n : {4, 8, 12, 16}) s.push_back({n, 1e-17, 1e-14});
  EXPECT_THROW(fit_decay_rate(s), InsufficientData);
  s.clear();
  for (int n = 1; n <= 6; ++n) s.push_back({n, std::pow(0.1, n), 0.0});
  EXPECT_EQ(fit_decay_rate(s, 1e-2).points_used, 4);
  EXPECT_THROW(fit_decay_rate(s, 1e-4), InsufficientData);
}

TEST(Fit, ScaleInvariant) {
  std::vector<ErrorSample> s, t;
  for (int n = 2; n <= 12; n += 2) {
    const double e = std::pow(0.3, n) * (1.0 + 0.1 * std::sin(n));
    s.push_back({n, e, 0.0});
    t.push_back({n, 1234.5 * e, 0.0});
  }
  const DecayFit a = fit_decay_rate(s), b = fit_decay_rate(t);
  EXPECT_NEAR(a.rate, b.rate, 1e-12);
  EXPECT_NEAR(b.log_prefactor - a.log_prefactor, std::log(1234.5), 1e-10);
}

TEST(Fit, RejectsGrowth) {
  std::vector<ErrorSample> s;
  for (int n = 1; n <= 5; ++n) s.push_back({n, std::pow(2.0, n), 0.0});
  EXPECT_THROW(fit_decay_rate(s), InsufficientData);
}

TEST(Study, ErrorsBelowInflatedBound) {
  const Integrand f = integrands::exponential();
  const Contour c = ellipse_contour(10.0);
  const double d_max = largest_safe_d_prime(f, 1, c);
  const double d_prime = 0.5 * d_max;
  const BoundParams bp = BoundParams::from(d_prime, c.period(), 10.0 * estimate_script_n(f, 1, c, d_prime));
  std::vector<int> ns;
  for (int n = 4; n <= 32; ++n) ns.push_back(n);
  const auto rows = convergence_study(FpProblem(1, f, c), ns, exact_exp_series(1), Rule::full);
  int checked = 0;
  for (const auto& r : rows) {
    if (r.rel_error <= r.floor) continue;
    EXPECT_LE(r.rel_error * exact_exp_series(1), theoretical_bound(bp, r.n_samples)) << r.n_samples;
    ++checked;
  }
  EXPECT_GE(checked, 4);
}

TEST(Study, RowsAndFloor) {
  const std::vector<int> ns{4, 8, 16};
  const auto rows = convergence_study(FpProblem(1, integrands::reciprocal(), ellipse_contour(2.0)), ns,
                                      exact_reciprocal(1), Rule::symmetric);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].rel_error, rows[2].rel_error);
  for (const auto& r : rows) EXPECT_GT(r.floor, 0.0);
  EXPECT_EQ(to_samples(rows).size(), 3u);
}
