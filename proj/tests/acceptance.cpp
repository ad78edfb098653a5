// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpquad/cli.hpp"
#include "fpquad/fpquad.hpp"

using namespace fpquad;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  if (!pass) ++failures;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

template <class F>
void guarded(int id, const char* title, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

void closed_form_exp() {
  const char* title = "adaptive rule vs exp series, rho=10";
  guarded(1, title, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
      const FpResult r = fp_integral_adaptive(FpProblem(n, integrands::exponential(), ellipse_contour(10.0)), cfg);
      worst = std::max(worst, rel(r.real(), exact_exp_series(n)));
    }
    const double t = seconds_since(t0);
    report(1, title, worst <= 1e-9 && t < 1.0, fmt("max rel err %.3g, %.3f s", worst, t));
  });
}

void closed_form_reciprocal() {
  const char* title = "adaptive rule vs 1/(1+x) closed form, rho=2";
  guarded(2, title, [&] {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-8;
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
      const FpResult r = fp_integral_adaptive(FpProblem(n, integrands::reciprocal(), ellipse_contour(2.0)), cfg);
      worst = std::max(worst, rel(r.real(), exact_reciprocal(n)));
    }
    report(2, title, worst <= 1e-7, fmt("max rel err %.3g", worst));
  });
}

void decay_rates() {
  const char* title = "fitted decay rates within factor 2 of reference, r^2 >= 0.98";
  guarded(3, title, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = cli::reproduce_table2();
    const double t = seconds_since(t0);
    bool ok = rows.size() == 10;
    double worst_ratio = 1.0, worst_r2 = 1.0;
    for (const auto& r : rows) {
      if (!r.fit) {
        ok = false;
        continue;
      }
      const double ratio = std::max(r.fit->rate / r.reference_rate, r.reference_rate / r.fit->rate);
      worst_ratio = std::max(worst_ratio, ratio);
      worst_r2 = std::min(worst_r2, r.fit->r_squared);
    }
    ok = ok && worst_ratio <= 2.0 && worst_r2 >= 0.98 && t < 5.0;
    report(3, title, ok, fmt("worst ratio %.3f, min r^2 %.4f", worst_ratio, worst_r2) + fmt(", %.3f s", t));
  });
}

void oracle_cross_check() {
  const char* title = "eps-limit oracle vs contour rule on the 10-case suite";
  guarded(4, title, [&] {
    double worst = 0.0;
    for (int which = 0; which < 2; ++which) {
      const Integrand f = which == 0 ? integrands::exponential() : integrands::reciprocal();
      const double rho = which == 0 ? 10.0 : 2.0;
      for (int n = 1; n <= 5; ++n) {
        const double contour = fp_integral_full(FpProblem(n, f, ellipse_contour(rho)), 256).real();
        worst = std::max(worst, rel(fp_limit_oracle(f, n).value, contour));
      }
    }
    report(4, title, worst <= 1e-6, fmt("max rel gap %.3g", worst));
  });
}

void halving_identity() {
  const char* title = "symmetric(N) = Re full(2N)";
  guarded(5, title, [&] {
    double worst = 0.0;
    for (int which = 0; which < 2; ++which) {
      const Integrand f = which == 0 ? integrands::exponential() : integrands::reciprocal();
      const double rho = which == 0 ? 10.0 : 2.0;
      for (int n = 1; n <= 5; ++n) {
        const FpProblem p(n, f, ellipse_contour(rho));
        for (int N : {8, 16, 32}) {
          worst = std::max(worst, rel(fp_integral_symmetric(p, N).real(), fp_integral_full(p, 2 * N).raw.real()));
        }
      }
    }
    report(5, title, worst <= 1e-13, fmt("max rel gap %.3g", worst));
  });
}

void contour_independence() {
  const char* title = "1/(1+x), n=3, rho in {2,3,4}, N=256";
  guarded(6, title, [&] {
    std::vector<double> v;
    for (double rho : {2.0, 3.0, 4.0}) {
      v.push_back(fp_integral_full(FpProblem(3, integrands::reciprocal(), ellipse_contour(rho)), 256).real());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) worst = std::max(worst, rel(v[i], v[j]));
    }
    report(6, title, worst <= 1e-9, fmt("max pairwise rel gap %.3g", worst));
  });
}

void bound_consistency() {
  const char* title = "errors under the strip bound, contraction vs largest safe strip";
  guarded(7, title, [&] {
    const Integrand f = integrands::exponential();
    const Contour c = ellipse_contour(10.0);
    const FpProblem p(1, f, c);
    const double exact = exact_exp_series(1);
    const double d_safe = cli::run_check(f, 1, c).d_safe;

    const double d_prime = 0.5 * d_safe;
    const auto bp = BoundParams::from(d_prime, c.period(), 10.0 * estimate_script_n(f, 1, c, d_prime));
    std::vector<int> grid;
    for (int N = 4; N <= 32; ++N) grid.push_back(N);
    const auto rows = convergence_study(p, grid, exact, Rule::full);
    bool bounded = true;
    for (const auto& r : rows) {
      if (r.rel_error * std::abs(exact) > theoretical_bound(bp, r.n_samples)) bounded = false;
    }
    const auto samples = to_samples(rows);
    const DecayFit fit = fit_decay_rate(samples, cli::kFitCeiling);
    const double predicted = std::exp(-2.0 * std::numbers::pi * d_safe / c.period());
    const bool ok = bounded && fit.rate <= 2.0 * predicted;
    report(7, title, ok,
           fmt("d_safe %.4f, rate %.4f", d_safe, fit.rate) + fmt(" vs exp(-2 pi d'/u_p) %.4f", predicted) +
               (bounded ? ", bounded" : ", bound exceeded"));
  });
}

void degenerate_battery() {
  const char* title = "constant, monomial and empty-correction cases";
  guarded(8, title, [&] {
    const Contour c = ellipse_contour(2.0);
    const double one_n1 = fp_integral_full(FpProblem(1, integrands::constant(1.0), c), 64).real();
    const double one_n2 = fp_integral_full(FpProblem(2, integrands::constant(1.0), c), 64).real();
    double mono = 0.0;
    for (int n = 1; n <= 5; ++n) {
      mono = std::max(mono, std::abs(fp_integral_full(FpProblem(n, integrands::monomial(n), c), 64).real() - 1.0));
    }
    const std::vector<Complex> derivs{Complex(3.0, 1.0)};
    const Complex corr = correction_sum(derivs, 1);
    const bool ok = std::abs(one_n1) <= 1e-12 && std::abs(one_n2 + 1.0) <= 1e-12 && mono <= 1e-12 && corr == Complex(0.0);
    report(8, title, ok, fmt("|n=1 f=1| %.2g, |n=2 f=1 + 1| %.2g", std::abs(one_n1), std::abs(one_n2 + 1.0)) +
                             fmt(", max |x^n - 1| %.2g", mono));
  });
}

expr::NodePtr generate(std::mt19937& gen, int depth, bool allow_z) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  switch (depth <= 0 ? pick(0, 2) : pick(0, 7)) {
    case 0: return expr::number(std::uniform_real_distribution<double>(0.0, 50.0)(gen));
    case 1: return expr::constant(pick(0, 1) ? expr::Named::pi : expr::Named::e);
    case 2: return allow_z ? expr::variable() : expr::number(pick(0, 9));
    case 3: return expr::negate(generate(gen, depth - 1, allow_z));
    case 4:
    case 5: {
      static constexpr expr::BinOp ops[] = {expr::BinOp::add, expr::BinOp::sub, expr::BinOp::mul, expr::BinOp::div};
      return expr::binary(ops[pick(0, 3)], generate(gen, depth - 1, allow_z), generate(gen, depth - 1, allow_z));
    }
    case 6: return expr::binary(expr::BinOp::pow, generate(gen, depth - 1, allow_z), generate(gen, depth - 2, false));
    default: {
      static constexpr expr::Func fns[] = {expr::Func::exp, expr::Func::log, expr::Func::sin, expr::Func::cos,
                                           expr::Func::sqrt};
      return expr::call(fns[pick(0, 4)], generate(gen, depth - 1, allow_z));
    }
  }
}

void parser_robustness() {
  const char* title = "1e5 random byte strings, 1e3 print/parse round trips";
  guarded(9, title, [&] {
    std::mt19937 gen(20260101);
    std::uniform_int_distribution<int> len(0, 80), byte(0, 255);
    int crashes = 0;
    for (int i = 0; i < 100000; ++i) {
      std::string s(static_cast<std::size_t>(len(gen)), '\0');
      for (auto& ch : s) ch = static_cast<char>(byte(gen));
      try {
        expr::parse(s);
      } catch (const ParseError&) {
      } catch (...) {
        ++crashes;
      }
    }
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      const expr::NodePtr n = generate(gen, 6, true);
      const std::string text = expr::print(*n);
      try {
        if (!expr::structurally_equal(*n, expr::parse(text).root())) ++mismatches;
      } catch (...) {
        ++mismatches;
      }
    }
    report(9, title, crashes == 0 && mismatches == 0, fmt("crashes %.0f, round-trip mismatches %.0f", crashes, mismatches));
  });
}

}  // namespace

int main() {
  closed_form_exp();
  closed_form_reciprocal();
  decay_rates();
  oracle_cross_check();
  halving_identity();
  contour_independence();
  bound_consistency();
  degenerate_battery();
  parser_robustness();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
