#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "fpquad/cli.hpp"

namespace {

using fpquad::cli::RunSpec;

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad N in --N-list: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void add_common(CLI::App* cmd, RunSpec& spec, bool with_expr) {
  if (with_expr) {
    cmd->add_option("-n", spec.n, "order of the endpoint singularity x^-n")->check(CLI::PositiveNumber);
    cmd->add_option("-f,--expr", spec.expr, "integrand f(z), e.g. \"exp(z)/(1+z)\"");
    cmd->add_option("--rho", spec.rho, "ellipse parameter (> 1)");
  }
  cmd->add_flag("--json", spec.json, "machine-readable output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-part integrals fp∫₀¹ x⁻ⁿ f(x) dx by trapezoidal loop integrals"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string symmetric = "auto";
  std::string n_list;
  std::optional<std::string> output;

  auto* compute = app.add_subcommand("compute", "evaluate one finite-part integral");
  add_common(compute, spec, true);
  compute->add_option("--tol", spec.tol, "relative tolerance of the adaptive driver")->check(CLI::PositiveNumber);
  compute->add_option("--N", spec.n_samples, "fixed N (disables adaptivity)");
  compute->add_option("--symmetric", symmetric, "auto, on or off")->check(CLI::IsMember({"auto", "on", "off"}));

  auto* study = app.add_subcommand("study", "relative errors over a list of N as CSV");
  add_common(study, spec, true);
  study->add_option("--N-list", n_list, "comma-separated N values")->required();
  study->add_option("-o,--output", output, "CSV file (default: stdout)");
  study->add_option("--exact", spec.exact, "reference value");
  study->add_option("--symmetric", symmetric, "auto, on or off")->check(CLI::IsMember({"auto", "on", "off"}));

  auto* table2 = app.add_subcommand("table2", "fitted decay rates for the two standard test integrals");
  add_common(table2, spec, false);

  auto* check = app.add_subcommand("check", "preflight and strip-width analysis only");
  add_common(check, spec, true);

  try {
    app.parse(argc, argv);
    if (!n_list.empty()) spec.n_list = parse_n_list(n_list);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fpquad::cli::exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fpquad::cli::exit_code::usage;
  }

  spec.output_path = output;
  spec.use_symmetric = symmetric == "on"    ? fpquad::cli::SymmetricMode::on
                       : symmetric == "off" ? fpquad::cli::SymmetricMode::off
                                            : fpquad::cli::SymmetricMode::automatic;
  if (*compute) spec.command = fpquad::cli::Command::compute;
  if (*study) spec.command = fpquad::cli::Command::study;
  if (*table2) spec.command = fpquad::cli::Command::table2;
  if (*check) spec.command = fpquad::cli::Command::check;
  return fpquad::cli::run(spec, std::cout, std::cerr);
}
