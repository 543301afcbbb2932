// qflow: command-line driver for the phase-field integrators.
//
//   qflow simulate <config>              run one scheme, write energy.csv and snapshots
//   qflow converge <config>              manufactured-solution convergence table
//   qflow split <coeffs...> [--kappa x]  positive split of a polynomial potential
//   qflow check-energy <csv> [--tol x]   verify a modified-energy series is non-increasing
//   qflow example <n>                    print a preset config (1 to 4)
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qflow/config.hpp"
#include "qflow/errors.hpp"
#include "qflow/harness.hpp"
#include "qflow/io.hpp"
#include "qflow/potential.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

int cmd_simulate(const std::string& path, bool quiet) {
  const qflow::ExperimentConfig cfg = qflow::parse_config(path);
  std::cout << to_config_text(cfg) << std::flush;
  const long every = std::max(1L, cfg.steps / 20);
  const auto observer = [&](const qflow::SchemeState& s, const qflow::EnergyRecord& rec) {
    if (!quiet && s.step % every == 0)
      std::fprintf(stderr, "step %ld  t=%-10.6g E=%.10g  E_mod=%.10g\n", rec.step, rec.time, rec.energy_original,
                   rec.energy_modified);
    return true;
  };
  const qflow::SimulationResult res = qflow::simulate_to_disk(cfg, observer);
  std::printf("# steps %zu, snapshots %zu, max relative energy increase %.3e, decay %s\n", res.series.size() - 1,
              res.snapshots.size(), res.decay.max_relative_increase, res.decay.passed() ? "ok" : "VIOLATED");
  std::printf("# outputs in %s\n", cfg.out_dir.c_str());
  return kOk;
}

int cmd_converge(const std::string& path) {
  const qflow::ExperimentConfig cfg = qflow::parse_config(path);
  const qflow::ConvergenceStudy study = qflow::convergence_study_from(cfg);
  const qflow::RunLock lock(cfg.out_dir);
  const qflow::ConvergenceTable table = qflow::run_convergence_study(study);
  qflow::write_text_file(std::filesystem::path(cfg.out_dir) / "config.resolved", to_config_text(cfg));
  qflow::write_convergence_table(std::filesystem::path(cfg.out_dir) / "convergence.csv", table);
  std::cout << qflow::format_convergence_table(table);
  return kOk;
}

int cmd_split(const std::vector<std::string>& coeff_args, double kappa) {
  std::vector<double> coeffs;
  for (const auto& arg : coeff_args) {
    std::string_view rest = arg;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto tok = rest.substr(0, comma);
      if (!tok.empty()) {
        const auto v = qflow::parse_double(tok);
        if (!v) throw qflow::ConfigError("not a number: '" + std::string(tok) + "'");
        coeffs.push_back(*v);
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  const qflow::PolynomialPotential f(coeffs);
  const qflow::SplitPotential sp = qflow::build_positive_split(f, kappa);
  std::cout << "F      = " << f.to_string() << "\n"
            << "M      = " << sp.m().to_string() << "\n"
            << "Ftilde = " << sp.ftilde().to_string() << "\n"
            << "kappa = " << qflow::format_double(sp.kappa()) << "\n"
            << "min Ftilde = " << qflow::format_double(sp.ftilde_minimum().value) << " at phi = "
            << qflow::format_double(sp.ftilde_minimum().phi) << "\n";
  return kOk;
}

int cmd_check_energy(const std::string& path, double tol) {
  const auto series = qflow::read_energy_series(path);
  if (series.empty()) throw qflow::IoError("energy series '" + path + "' has no records");
  const qflow::DecayReport rep = qflow::assert_energy_decay(series, tol);
  std::printf("%zu records, max relative increase %.3e (tol %.1e)\n", series.size(),
              rep.max_relative_increase, tol);
  for (std::size_t i : rep.violations)
    std::printf("increase at step %ld: %.17g -> %.17g\n", series[i].step, series[i - 1].energy_modified,
                series[i].energy_modified);
  if (rep.passed()) {
    std::printf("non-increasing\n");
    return kOk;
  }
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-stable integrators for phase-field gradient flows"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* simulate = app.add_subcommand("simulate", "Run one scheme from a config file");
  simulate->add_option("config", config_path, "Config file")->required();
  simulate->add_flag("-q,--quiet", quiet, "No progress output");

  auto* converge = app.add_subcommand("converge", "Manufactured-solution convergence study");
  converge->add_option("config", config_path, "Config file")->required();

  std::vector<std::string> coeffs;
  double kappa = 1e-8;
  auto* split = app.add_subcommand("split", "Positive split of F = a0 + a1 phi + ...");
  split->add_option("coeffs", coeffs, "Coefficients a0 a1 ... (spaces or commas)")->required();
  split->add_option("--kappa", kappa, "Regularizer kappa")->check(CLI::NonNegativeNumber);

  std::string series_path;
  double tol = 1e-10;
  auto* check = app.add_subcommand("check-energy", "Check an energy.csv for monotone modified energy");
  check->add_option("series", series_path, "energy.csv file")->required();
  check->add_option("--tol", tol, "Relative per-step tolerance")->check(CLI::NonNegativeNumber);

  int example = 0;
  auto* ex = app.add_subcommand("example", "Print a preset config");
  ex->add_option("number", example, "Scenario 1 to 4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, quiet);
    if (*converge) return cmd_converge(config_path);
    if (*split) return cmd_split(coeffs, kappa);
    if (*check) return cmd_check_energy(series_path, tol);
    if (*ex) {
      std::cout << qflow::to_config_text(qflow::example_config(example));
      return kOk;
    }
  } catch (const qflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const qflow::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const qflow::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const qflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
