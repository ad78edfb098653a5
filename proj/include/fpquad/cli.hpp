#pragma once

/**
 * @file cli.hpp
 * @brief Command implementations behind the fpquad command-line tool.
 *
 * Each command writes its report to `out`, diagnostics to `err`, and returns
 * the process exit status:
 *
 *   0  success
 *   1  usage, parse or I/O error
 *   2  preflight failure (contour or integrand violates a hypothesis)
 *   3  adaptive evaluation did not converge
 */

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpquad/analysis.hpp"
#include "fpquad/errors.hpp"
#include "fpquad/expr.hpp"
#include "fpquad/integrands.hpp"
#include "fpquad/model.hpp"
#include "fpquad/oracle.hpp"
#include "fpquad/quadrature.hpp"

namespace fpquad::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int preflight = 2;
inline constexpr int non_convergence = 3;
}  // namespace exit_code

enum class Command { compute, study, table2, check };
enum class SymmetricMode { automatic, on, off };

struct RunSpec {
  Command command = Command::compute;
  int n = 1;
  std::string expr = "exp(z)";
  double rho = 10.0;
  /// Fixed N; empty means adaptive.
  std::optional<int> n_samples;
  std::vector<int> n_list;
  double tol = 1e-12;
  SymmetricMode use_symmetric = SymmetricMode::automatic;
  std::optional<std::string> output_path;
  bool json = false;
  /// Reference value for study; otherwise a closed form or the limit oracle.
  std::optional<double> exact;
};

/// Relative errors above this are treated as pre-asymptotic and not fitted.
inline constexpr double kFitCeiling = 1e-3;

inline std::string format_number(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string format_value(Complex v, bool real, int digits) {
  if (real) return format_number(v.real(), digits);
  return format_number(v.real(), digits) + (v.imag() < 0 ? "-" : "+") + format_number(std::abs(v.imag()), digits) +
         "i";
}

struct PreflightReport {
  bool winding = false;
  bool symmetry = false;
  bool singularities_excluded = false;
};

namespace detail {

inline Contour make_contour(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) {
    throw PreflightError(PreflightError::Check::winding,
                         "invalid ellipse: rho = " + format_number(rho, 12) + " must be > 1");
  }
  return ellipse_contour(rho);
}

/// Winding and singularity checks throw; symmetry is only recorded.
inline PreflightReport run_preflight(const Integrand& f, const Contour& c) {
  preflight(f, c, PreflightOptions{1024, true});
  PreflightReport rep;
  rep.winding = true;
  rep.singularities_excluded = true;
  rep.symmetry = check_symmetry(c);
  return rep;
}

inline Rule choose_rule(SymmetricMode mode, const Integrand& f, const PreflightReport& rep) {
  switch (mode) {
    case SymmetricMode::on:
      if (!f.real_on_interval()) throw SymmetryRequirement("--symmetric on needs an integrand real on [0,1]");
      if (!rep.symmetry) throw SymmetryRequirement("--symmetric on needs a mirror-symmetric contour");
      return Rule::symmetric;
    case SymmetricMode::off: return Rule::full;
    case SymmetricMode::automatic: break;
  }
  return f.real_on_interval() && rep.symmetry ? Rule::symmetric : Rule::full;
}

inline const char* rule_name(Rule r) { return r == Rule::symmetric ? "symmetric" : "full"; }

inline const char* check_name(PreflightError::Check c) {
  switch (c) {
    case PreflightError::Check::winding: return "winding";
    case PreflightError::Check::symmetry: return "symmetry";
    case PreflightError::Check::singularity: return "singularity exclusion";
    case PreflightError::Check::analyticity: return "singularity exclusion";
  }
  return "preflight";
}

/// Runs body() and maps library exceptions onto exit codes with a one-line
/// diagnostic.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const PreflightError& e) {
    err << "preflight failed [" << check_name(e.check()) << "]: " << e.what() << '\n';
    return exit_code::preflight;
  } catch (const AnalyticityViolated& e) {
    err << "preflight failed [strip]: " << e.what() << '\n';
    return exit_code::preflight;
  } catch (const EvaluationError& e) {
    err << "preflight failed [evaluation]: " << e.what() << '\n';
    return exit_code::preflight;
  } catch (const BranchCutError& e) {
    err << "preflight failed [branch cut]: " << e.what() << '\n';
    return exit_code::preflight;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << " (best value " << format_value(e.best_estimate(), true, 12) << ", last change "
        << format_number(e.error_bound(), 3) << " at N = " << e.n_samples() << ")\n";
    return exit_code::non_convergence;
  } catch (const std::ios_base::failure& e) {
    err << "error: I/O failure: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
}

inline bool same_expr(const expr::Expr& e, const char* src) {
  return expr::structurally_equal(e, expr::parse(src));
}

inline double reference_value(const RunSpec& spec, const expr::Expr& e, const Integrand& f) {
  if (spec.exact) return *spec.exact;
  if (same_expr(e, "exp(z)")) return exact_exp_series(spec.n);
  if (same_expr(e, "1/(1+z)")) return exact_reciprocal(spec.n);
  if (!f.real_on_interval()) throw InvalidParameter("no reference value for a complex integrand; pass --exact");
  return fp_limit_oracle(f, spec.n).value;
}

inline std::string preflight_line(const PreflightReport& rep) {
  std::string s = "winding +1 around [0,1]: ";
  s += rep.winding ? "ok" : "FAILED";
  s += "; mirror symmetry: ";
  s += rep.symmetry ? "ok" : "no";
  s += "; singularities excluded: ";
  s += rep.singularities_excluded ? "ok" : "FAILED";
  return s;
}

inline nlohmann::json preflight_json(const PreflightReport& rep) {
  return {{"winding", rep.winding}, {"symmetry", rep.symmetry}, {"singularities_excluded", rep.singularities_excluded}};
}

}  // namespace detail

inline int cmd_compute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (spec.n < 1) throw InvalidParameter("-n must be >= 1");
    const expr::Expr e = expr::parse(spec.expr);
    const Integrand f = expr::make_integrand(e);
    const Contour c = detail::make_contour(spec.rho);
    const PreflightReport rep = detail::run_preflight(f, c);
    const Rule rule = detail::choose_rule(spec.use_symmetric, f, rep);
    const FpProblem p(spec.n, f, c);

    QuadratureConfig cfg;
    cfg.rule = rule;
    cfg.rel_tol = spec.tol;
    if (spec.n_samples) {
      cfg.adaptive = false;
      cfg.n_samples = *spec.n_samples;
      cfg.n_max = *spec.n_samples;
    }
    const FpResult r = fp_integral_adaptive(p, cfg, false);

    if (spec.json) {
      nlohmann::json j;
      j["n"] = spec.n;
      j["expr"] = spec.expr;
      j["rho"] = spec.rho;
      j["value"] = r.value.real();
      if (!r.real_valued) j["value_imag"] = r.value.imag();
      j["N"] = r.n_samples;
      j["rule"] = detail::rule_name(rule);
      j["evaluations"] = r.n_evaluations;
      j["err_estimate"] = r.err_estimate ? nlohmann::json(*r.err_estimate) : nlohmann::json(nullptr);
      j["imag_residual"] = r.imag_residual;
      j["preflight"] = detail::preflight_json(rep);
      out << j.dump() << '\n';
      return exit_code::ok;
    }
    const int nodes = rule == Rule::symmetric ? r.n_samples + 1 : r.n_samples;
    out << "value           " << format_value(r.value, r.real_valued, 12) << '\n';
    out << "N               " << r.n_samples << " (" << detail::rule_name(rule) << " rule, " << nodes
        << " nodes)\n";
    out << "evaluations     " << r.n_evaluations << '\n';
    out << "error estimate  " << (r.err_estimate ? format_number(*r.err_estimate, 3) : std::string("n/a (fixed N)"))
        << '\n';
    out << "imag residual   " << format_number(r.imag_residual, 3) << '\n';
    out << "preflight       " << detail::preflight_line(rep) << '\n';
    return exit_code::ok;
  });
}

/// Convergence study rows for spec.n_list, with the rule chosen as in
/// cmd_compute.
inline std::vector<StudyRow> run_study(const RunSpec& spec, double* exact_out = nullptr) {
  if (spec.n < 1) throw InvalidParameter("-n must be >= 1");
  if (spec.n_list.empty()) throw InvalidParameter("study needs --N-list");
  const expr::Expr e = expr::parse(spec.expr);
  const Integrand f = expr::make_integrand(e);
  const Contour c = detail::make_contour(spec.rho);
  const PreflightReport rep = detail::run_preflight(f, c);
  const Rule rule = detail::choose_rule(spec.use_symmetric, f, rep);
  const int n_min = rule == Rule::symmetric ? 2 : 4;
  for (int n : spec.n_list) {
    if (n < n_min) {
      throw InvalidParameter("N = " + std::to_string(n) + " is below the minimum " + std::to_string(n_min) +
                             " for the " + detail::rule_name(rule) + " rule");
    }
  }
  const double exact = detail::reference_value(spec, e, f);
  if (exact_out) *exact_out = exact;
  return convergence_study(FpProblem(spec.n, f, c), spec.n_list, exact, rule);
}

/// CSV text: header, one row per N, then `# rate=<r>` when a fit exists.
inline std::string study_csv(std::span<const StudyRow> rows) {
  std::string csv = "N,approx,rel_error\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.n_samples) + "," + format_number(r.approx, 17) + "," + format_number(r.rel_error, 17) +
           "\n";
  }
  try {
    const auto samples = to_samples(rows);
    const DecayFit fit = fit_decay_rate(samples, kFitCeiling);
    csv += "# rate=" + format_number(fit.rate, 17) + "\n";
  } catch (const InsufficientData&) {
  }
  return csv;
}

inline int cmd_study(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    std::ofstream file;
    if (spec.output_path) {
      file.open(*spec.output_path, std::ios::out | std::ios::trunc | std::ios::binary);
      if (!file) {
        err << "error: cannot open '" << *spec.output_path << "' for writing\n";
        return exit_code::usage;
      }
    }
    const std::string csv = study_csv(run_study(spec));
    if (spec.output_path) {
      file << csv;
      file.flush();
      if (!file) {
        err << "error: write to '" << *spec.output_path << "' failed\n";
        return exit_code::usage;
      }
    } else {
      out << csv;
    }
    return exit_code::ok;
  });
}

struct Table2Row {
  int integral = 1;  ///< 1: f = exp, 2: f = 1/(1+x)
  int n = 1;
  double rho = 0.0;
  double reference_rate = 0.0;
  std::optional<DecayFit> fit;
};

/// Published decay rates for n = 1..5.
inline constexpr double kReferenceRates[2][5] = {{0.024, 0.025, 0.021, 0.029, 0.039},
                                                 {0.25, 0.29, 0.32, 0.35, 0.38}};

/// Symmetric-rule N grids used for the fits.
inline std::vector<int> table2_grid(int integral) {
  std::vector<int> grid;
  if (integral == 1) {
    for (int n = 2; n <= 16; ++n) grid.push_back(n);
  } else {
    for (int n = 2; n <= 64; n += 2) grid.push_back(n);
  }
  return grid;
}

/// Decay rates for exp (ρ = 10) and 1/(1+x) (ρ = 2), n = 1..5.
inline std::vector<Table2Row> reproduce_table2() {
  std::vector<Table2Row> rows;
  for (int integral : {1, 2}) {
    const double rho = integral == 1 ? 10.0 : 2.0;
    const Integrand f = integral == 1 ? integrands::exponential() : integrands::reciprocal();
    const auto grid = table2_grid(integral);
    const Contour c = ellipse_contour(rho);
    for (int n = 1; n <= 5; ++n) {
      const double exact = integral == 1 ? exact_exp_series(n) : exact_reciprocal(n);
      const auto study = convergence_study(FpProblem(n, f, c), grid, exact, Rule::symmetric);
      Table2Row row{integral, n, rho, kReferenceRates[integral - 1][n - 1], std::nullopt};
      try {
        const auto samples = to_samples(study);
        row.fit = fit_decay_rate(samples, kFitCeiling);
      } catch (const InsufficientData&) {
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline int cmd_table2(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto rows = reproduce_table2();
    if (spec.json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json item{{"integral", r.integral}, {"n", r.n}, {"rho", r.rho}, {"reference", r.reference_rate}};
        item["measured"] = r.fit ? nlohmann::json(r.fit->rate) : nlohmann::json(nullptr);
        item["r_squared"] = r.fit ? nlohmann::json(r.fit->r_squared) : nlohmann::json(nullptr);
        j.push_back(item);
      }
      out << j.dump() << '\n';
      return exit_code::ok;
    }
    out << "integral      rho   n   measured   reference   ratio    r^2\n";
    for (const auto& r : rows) {
      std::ostringstream line;
      line << std::left << std::setw(12) << (r.integral == 1 ? "exp(x)" : "1/(1+x)") << std::right << std::setw(5)
           << r.rho << std::setw(4) << r.n;
      if (r.fit) {
        line << std::fixed << std::setprecision(4) << std::setw(11) << r.fit->rate << std::setprecision(3)
             << std::setw(12) << r.reference_rate << std::setprecision(2) << std::setw(8)
             << r.fit->rate / r.reference_rate << std::setprecision(4) << std::setw(9) << r.fit->r_squared;
      } else {
        line << std::setw(11) << "n/a" << std::fixed << std::setprecision(3) << std::setw(12) << r.reference_rate;
      }
      out << line.str() << '\n';
    }
    return exit_code::ok;
  });
}

struct StripSample {
  double d_prime = 0.0;
  double script_n = 0.0;
  /// exp(−2πd'/u_p), the contraction per full-rule node this strip predicts.
  double predicted_rate = 0.0;
};

struct CheckReport {
  PreflightReport preflight;
  double d_safe = 0.0;
  std::vector<StripSample> sweep;
};

/// Preflight plus the strip analysis: the widest admissible d' and 𝒩 at a
/// few fractions of it.
inline CheckReport run_check(const Integrand& f, int n, const Contour& c) {
  CheckReport rep;
  rep.preflight = detail::run_preflight(f, c);
  rep.d_safe = largest_safe_d_prime(f, n, c);
  for (double frac : {0.25, 0.5, 0.75, 0.95}) {
    const double d = frac * rep.d_safe;
    rep.sweep.push_back({d, estimate_script_n(f, n, c, d), std::exp(-2.0 * std::numbers::pi * d / c.period())});
  }
  return rep;
}

inline int cmd_check(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (spec.n < 1) throw InvalidParameter("-n must be >= 1");
    const expr::Expr e = expr::parse(spec.expr);
    const Integrand f = expr::make_integrand(e);
    const Contour c = detail::make_contour(spec.rho);
    const CheckReport rep = run_check(f, spec.n, c);
    if (spec.json) {
      nlohmann::json j;
      j["preflight"] = detail::preflight_json(rep.preflight);
      j["d_safe"] = rep.d_safe;
      j["sweep"] = nlohmann::json::array();
      for (const auto& s : rep.sweep) {
        j["sweep"].push_back({{"d_prime", s.d_prime}, {"script_n", s.script_n}, {"predicted_rate", s.predicted_rate}});
      }
      out << j.dump() << '\n';
      return exit_code::ok;
    }
    out << "preflight       " << detail::preflight_line(rep.preflight) << '\n';
    out << "largest safe d' " << format_number(rep.d_safe, 6) << '\n';
    for (const auto& s : rep.sweep) {
      out << "  d' = " << format_number(s.d_prime, 6) << "  script_N = " << format_number(s.script_n, 6)
          << "  predicted rate = " << format_number(s.predicted_rate, 6) << '\n';
    }
    return exit_code::ok;
  });
}

inline int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  switch (spec.command) {
    case Command::compute: return cmd_compute(spec, out, err);
    case Command::study: return cmd_study(spec, out, err);
    case Command::table2: return cmd_table2(spec, out, err);
    case Command::check: return cmd_check(spec, out, err);
  }
  return exit_code::usage;
}

}  // namespace fpquad::cli
