#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fpquad/integrands.hpp"
#include "fpquad/oracle.hpp"

using namespace fpquad;

// Reference values from 40-digit evaluation of the series and closed forms.
constexpr double kExpSeries[] = {1.3179021514544038949, -0.4003796770046413405, -1.3093307527318432879,
                                 -1.2869819715080739522, -0.99089928332511313023};
constexpr double kReciprocal[] = {-0.69314718055994530942, -0.30685281944005469058, -0.19314718055994530942,
                                  -0.14018615277338802392, -0.10981384722661197608};

TEST(GaussQuad, Examples) {
  EXPECT_NEAR(gauss_quad([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(gauss_quad([](double x) { return std::exp(x); }, 0.0, 1.0), 1.7182818284590452354, 1e-13);
  EXPECT_NEAR(gauss_quad([](double x) { return 1.0 / x; }, 1e-3, 1.0), 6.9077552789821370521, 1e-11);
}

TEST(GaussQuad, Errors) {
  EXPECT_THROW(gauss_quad([](double x) { return x; }, 1.0, 1.0), InvalidParameter);
  EXPECT_THROW(gauss_quad([](double x) { return x; }, 0.0, 1.0, 0.0), InvalidParameter);
  // Divergent at 0: the panel next to 0 never meets the tolerance.
  EXPECT_THROW(gauss_quad([](double x) { return 1.0 / x; }, 0.0, 1.0), InnerQuadratureError);
  EXPECT_THROW(gauss_quad([](double) { return std::nan(""); }, 0.0, 1.0), InnerQuadratureError);
  // A jump is resolved by bisection.
  EXPECT_NEAR(gauss_quad([](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; }, 0.0, 1.0), 2.0 / 3.0, 1e-12);
}

TEST(ExactValues, ExpSeries) {
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(exact_exp_series(n), kExpSeries[n - 1], 2e-16 * 8) << n;
  EXPECT_NEAR(exact_exp_series(1, 30), 1.3179021514544038, 1e-15);
  EXPECT_LT(std::abs(exact_exp_series(2, 30) - exact_exp_series(2, 60)), 1e-15);
  EXPECT_THROW(exact_exp_series(5, 24), InvalidParameter);
  EXPECT_THROW(exact_exp_series(0), InvalidParameter);
}

TEST(ExactValues, Reciprocal) {
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(exact_reciprocal(n), kReciprocal[n - 1], 1e-16) << n;
  EXPECT_THROW(exact_reciprocal(0), InvalidParameter);
}

TEST(LimitOracle, TrivialIntegrands) {
  EXPECT_NEAR(fp_limit_oracle(integrands::constant(1.0), 1).value, 0.0, 1e-8);
  EXPECT_NEAR(fp_limit_oracle(integrands::constant(1.0), 2).value, -1.0, 1e-8);
  EXPECT_NEAR(fp_limit_oracle(integrands::exponential(), 2).value, -0.400380, 1e-6);
}

TEST(LimitOracle, TruncatedValueIsExactlyConstantForUnitIntegrand) {
  const OracleResult r = fp_limit_oracle(integrands::constant(1.0), 2);
  for (double v : r.sequence) EXPECT_NEAR(v, -1.0, 1e-12);
}

TEST(LimitOracle, MatchesClosedForms) {
  for (int n = 1; n <= 5; ++n) {
    EXPECT_LE(std::abs(fp_limit_oracle(integrands::exponential(), n).value - kExpSeries[n - 1]),
              1e-6 * std::abs(kExpSeries[n - 1]));
    EXPECT_LE(std::abs(fp_limit_oracle(integrands::reciprocal(), n).value - kReciprocal[n - 1]),
              1e-6 * std::abs(kReciprocal[n - 1]));
  }
}

TEST(LimitOracle, WorksWithCauchyDerivatives) {
  // No derivative metadata: f(0), f'(0), ... come from the Cauchy circle.
  const Integrand f([](Complex z) { return std::exp(z); }, true, {}, std::vector<Complex>{});
  for (int n = 1; n <= 5; ++n) {
    EXPECT_LE(std::abs(fp_limit_oracle(f, n).value - kExpSeries[n - 1]), 1e-6 * std::abs(kExpSeries[n - 1]));
  }
}

TEST(LimitOracle, AlternativeExtrapolations) {
  OracleConfig cfg;
  cfg.stability_tol = 1.0;
  cfg.extrapolation = Extrapolation::last_value;
  EXPECT_NEAR(fp_limit_oracle(integrands::exponential(), 1, cfg).value, kExpSeries[0], 0.1);
  cfg.extrapolation = Extrapolation::richardson_linear;
  EXPECT_NEAR(fp_limit_oracle(integrands::exponential(), 1, cfg).value, kExpSeries[0], 1e-2);
}

TEST(LimitOracle, UnstableSequenceIsReported) {
  OracleConfig cfg;
  cfg.extrapolation = Extrapolation::last_value;
  try {
    fp_limit_oracle(integrands::exponential(), 3, cfg);
    FAIL() << "expected OracleUnstable";
  } catch (const OracleUnstable& e) {
    EXPECT_EQ(e.sequence().size(), cfg.eps_sequence.size());
  }
}

TEST(LimitOracle, ConfigValidation) {
  OracleConfig cfg;
  cfg.eps_sequence = {0.1, 0.2};
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg.eps_sequence = {0.5, 0.1};
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg.eps_sequence = {0.1};
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg = {};
  EXPECT_NO_THROW(cfg.validate());
  const Integrand complex_f([](Complex z) { return std::exp(z); }, false);
  EXPECT_THROW(fp_limit_oracle(complex_f, 1), InvalidParameter);
}
