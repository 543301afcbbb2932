#include "qflow/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "qflow/errors.hpp"
#include "qflow/io.hpp"

namespace qflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kManufacturedPeriod = 16.0;

/// params overriding a prefix of defaults.
std::vector<double> with_defaults(std::span<const double> params, std::vector<double> defaults, const char* kind) {
  if (params.size() > defaults.size()) {
    std::ostringstream os;
    os << "initial condition " << kind << " takes at most " << defaults.size() << " parameters, got "
       << params.size();
    throw ConfigError(os.str());
  }
  for (std::size_t i = 0; i < params.size(); ++i) defaults[i] = params[i];
  return defaults;
}

template <typename E>
[[noreturn]] void rethrow_at_step(const E& e, long step) {
  throw E("step " + std::to_string(step) + ": " + e.what());
}

}  // namespace

Field2D initial_condition(IcKind kind, const Grid& grid, std::span<const double> params, std::uint64_t seed) {
  switch (kind) {
    case IcKind::KissingBubbles: {
      const auto p = with_defaults(params, {0.36, 0.01, 0.4, 0.0, -0.4, 0.0}, "kissing_bubbles");
      const double r0 = p[0], width = std::sqrt(2.0) * p[1];
      if (!(p[1] > 0.0)) throw ConfigError("kissing_bubbles: interface width eps must be positive");
      return Field2D::from_function(grid, [&](double x, double y) {
        double v = 1.0;
        for (int i = 0; i < 2; ++i) v -= std::tanh((std::hypot(x - p[2 + 2 * i], y - p[3 + 2 * i]) - r0) / width);
        return v;
      });
    }
    case IcKind::UniformRandom: {
      const auto p = with_defaults(params, {0.0, 1.0}, "uniform_random");
      UniformStream rng(seed);
      Field2D u(grid);
      for (auto& v : u.values()) v = rng.next_signed();
      const double avg = u.mean();
      for (auto& v : u.values()) v = p[0] + p[1] * (v - avg);
      return u;
    }
    case IcKind::TrigMode: {
      const auto p = with_defaults(params, {16.0, 1.0}, "trig_mode");
      if (!(p[0] > 0.0)) throw ConfigError("trig_mode: period must be positive");
      return Field2D::from_function(grid, [&](double x, double y) {
        return p[1] * std::sin(kTwoPi * x / p[0]) * std::sin(kTwoPi * y / p[0]);
      });
    }
    case IcKind::SmoothRandom: {
      const auto p = with_defaults(params, {0.3, 3.0, 0.0}, "smooth_random");
      const double modes = p[1];
      if (!(modes >= 1.0) || modes != std::floor(modes) || modes > 64.0)
        throw ConfigError("smooth_random: modes must be an integer in [1, 64]");
      const int k = static_cast<int>(modes);
      UniformStream rng(seed);
      Field2D out(grid, p[2]);
      std::vector<double> sx(grid.nx()), sy(grid.ny());
      for (int a = 1; a <= k; ++a) {
        for (int b = 1; b <= k; ++b) {
          const double c = p[0] * rng.next_signed();
          const double px = kTwoPi * rng.next();
          const double py = kTwoPi * rng.next();
          for (std::size_t i = 0; i < grid.nx(); ++i) sx[i] = std::sin(kTwoPi * a * (grid.x(i) - grid.origin()[0]) / grid.lx() + px);
          for (std::size_t j = 0; j < grid.ny(); ++j) sy[j] = std::sin(kTwoPi * b * (grid.y(j) - grid.origin()[1]) / grid.ly() + py);
          for (std::size_t i = 0; i < grid.nx(); ++i)
            for (std::size_t j = 0; j < grid.ny(); ++j) out(i, j) += c * sx[i] * sy[j];
        }
      }
      return out;
    }
  }
  throw ConfigError("unknown initial condition kind");
}

Field2D manufactured_exact(const Grid& grid, double t) {
  const double ct = std::cos(t);
  return Field2D::from_function(grid, [&](double x, double y) {
    return ct * std::sin(kTwoPi * x / kManufacturedPeriod) * std::sin(kTwoPi * y / kManufacturedPeriod);
  });
}

Field2D manufactured_forcing(const ModelSpec& m, double t) {
  const Field2D exact = manufactured_exact(m.grid(), t);
  Field2D f = manufactured_exact(m.grid(), 0.0);
  f *= -std::sin(t);
  f -= apply_symbol(m.g_symbol(), chemical_potential(m, exact));
  return f;
}

std::vector<ConvergenceColumn> default_convergence_columns() {
  std::vector<ConvergenceColumn> cols;
  SchemeConfig ieq;
  ieq.kind = SchemeKind::IeqCn;
  ieq.c = 1.0;
  cols.push_back({"IEQ", ieq});
  SchemeConfig mieq;
  mieq.kind = SchemeKind::MieqCnLinear;
  mieq.s = 1.2;
  cols.push_back({"MIEQ", mieq});
  SchemeConfig sav;
  sav.kind = SchemeKind::StabSavBdf2;
  sav.c = 10.0;
  cols.push_back({"SAV", sav});
  SchemeConfig msav;
  msav.kind = SchemeKind::MsavBdf2Double;
  cols.push_back({"MSAV", msav});
  return cols;
}

ConvergenceTable run_convergence_study(const ConvergenceStudy& study) {
  if (study.dts.empty() || study.columns.empty()) throw ConfigError("convergence study needs time steps and columns");
  if (!(study.final_time > 0.0)) throw ConfigError("convergence study needs a positive final time");
  const Grid grid = make_grid(study.nx, study.ny, study.lx, study.ly, study.origin);
  const ModelSpec model = make_model(study.model, study.params, grid);
  const Field2D phi0 = manufactured_exact(grid, 0.0);
  const Field2D exact = manufactured_exact(grid, study.final_time);
  const Forcing forcing = [&model](double t) { return manufactured_forcing(model, t); };

  ConvergenceTable table;
  table.dts = study.dts;
  for (const auto& col : study.columns) {
    table.labels.push_back(col.label);
    std::vector<ConvergenceCell> cells;
    for (double dt : study.dts) {
      ConvergenceCell cell;
      cell.dt = dt;
      try {
        const double ratio = study.final_time / dt;
        const long steps = std::lround(ratio);
        if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
          throw ConfigError("final time is not a multiple of dt");
        const Scheme scheme(model, col.scheme);
        SchemeState state = scheme.init(phi0, dt);
        for (long n = 0; n < steps; ++n) scheme.advance(state, forcing);
        cell.error = norm2(state.phi - exact);
      } catch (const Error& e) {
        cell.failure = e.what();
      }
      if (!cells.empty() && cells.back().error && cell.error && *cell.error > 0.0)
        cell.rate = std::log2(*cells.back().error / *cell.error);
      cells.push_back(std::move(cell));
    }
    table.cells.push_back(std::move(cells));
  }
  return table;
}

ConvergenceStudy convergence_study_from(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("model required");
  const auto multiple = [](double l) {
    const double r = l / kManufacturedPeriod;
    return r >= 1.0 && std::abs(r - std::round(r)) < 1e-12 * r;
  };
  if (!multiple(cfg.lx) || !multiple(cfg.ly))
    throw ConfigError("the manufactured solution needs lx and ly to be multiples of 16");
  ConvergenceStudy s;
  s.model = *cfg.model;
  s.params = cfg.model_params;
  s.nx = cfg.nx;
  s.ny = cfg.ny;
  s.lx = cfg.lx;
  s.ly = cfg.ly;
  s.origin = cfg.origin;
  s.final_time = cfg.final_time.value_or(1.0);
  s.dts.clear();
  double dt = cfg.dt;
  for (int i = 0; i < cfg.levels; ++i, dt *= 0.5) s.dts.push_back(dt);
  if (cfg.scheme) s.columns = {{std::string(to_string(*cfg.scheme)), cfg.scheme_config()}};
  return s;
}

DecayReport assert_energy_decay(std::span<const EnergyRecord> series, double tol) {
  DecayReport rep;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double prev = series[i - 1].energy_modified;
    const double rel = (series[i].energy_modified - prev) / (1.0 + std::abs(prev));
    rep.max_relative_increase = std::max(rep.max_relative_increase, rel);
    if (rel > tol) rep.violations.push_back(i);
  }
  return rep;
}

ModelSpec build_model(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("model required");
  const Grid grid = make_grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly, cfg.origin);
  return make_model(*cfg.model, cfg.model_params, grid);
}

Scheme build_scheme(const ExperimentConfig& cfg) {
  if (!cfg.scheme) throw ConfigError("scheme required");
  return Scheme(build_model(cfg), cfg.scheme_config());
}

SimulationResult run_simulation(const ExperimentConfig& cfg, const StepObserver& observer) {
  constexpr double kMonitorTol = 1e-10;
  const Scheme scheme = build_scheme(cfg);
  const Field2D phi0 = initial_condition(cfg.ic, scheme.model().grid(), cfg.ic_params, cfg.seed);

  std::vector<long> snapshot_steps;
  for (double t : cfg.snapshots) snapshot_steps.push_back(std::lround(t / cfg.dt));

  SimulationResult out;
  long step = 0;
  auto capture = [&](const SchemeState& s) {
    for (long k : snapshot_steps)
      if (k == s.step) out.snapshots.push_back({s.time(), s.phi});
  };
  try {
    SchemeState state = scheme.init(phi0, cfg.dt);
    out.series.push_back(scheme.record(state));
    capture(state);
    if (observer && !observer(state, out.series.back())) return out;
    for (step = 1; step <= cfg.steps; ++step) {
      const EnergyRecord rec = scheme.advance(state);
      const double prev = out.series.back().energy_modified;
      out.series.push_back(rec);
      capture(state);
      if (cfg.monitor && rec.energy_modified - prev > kMonitorTol * (1.0 + std::abs(prev))) {
        std::ostringstream os;
        os.precision(17);
        os << "modified energy increased from " << prev << " to " << rec.energy_modified;
        throw NumericalError(os.str());
      }
      if (observer && !observer(state, rec)) break;
    }
  } catch (const RadicandError& e) {
    rethrow_at_step(e, step);
  } catch (const SolverError& e) {
    rethrow_at_step(e, step);
  } catch (const NumericalError& e) {
    rethrow_at_step(e, step);
  }
  out.decay = assert_energy_decay(out.series, kMonitorTol);
  return out;
}

void write_run_outputs(const ExperimentConfig& cfg, const SimulationResult& result) {
  const std::filesystem::path dir(cfg.out_dir);
  write_text_file(dir / "config.resolved", to_config_text(cfg));
  write_energy_series(dir / "energy.csv", result.series);
  const std::string model(to_string(*cfg.model));
  const std::string scheme(to_string(*cfg.scheme));
  for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.qfld", i);
    const auto& s = result.snapshots[i];
    write_snapshot(dir / name, make_snapshot_header(s.field, s.time, model, scheme), s.field);
  }
}

SimulationResult simulate_to_disk(const ExperimentConfig& cfg, const StepObserver& observer) {
  const RunLock lock(cfg.out_dir);
  SimulationResult result = run_simulation(cfg, observer);
  write_run_outputs(cfg, result);
  return result;
}

ExperimentConfig example_config(int number) {
  ExperimentConfig c;
  switch (number) {
    case 1:
      c.model = ModelKind::CahnHilliard;
      c.model_params = {0.01, 0.0, 1.0, 0.0, SplitChoice::Default};
      c.scheme = SchemeKind::StabSavBdf2;
      c.s = 2.0;
      c.c = 1.0;
      c.nx = c.ny = 256;
      c.lx = c.ly = 2.0;
      c.origin = {-1.0, -1.0};
      c.dt = 1e-4;
      c.final_time = 1.0;
      c.steps = 10000;
      c.ic = IcKind::KissingBubbles;
      c.ic_params = {0.36, 0.01, 0.4, 0.0, -0.4, 0.0};
      c.snapshots = {0.0, 0.01, 0.02, 0.1, 0.5, 1.0};
      c.monitor = true;
      c.out_dir = "example1";
      return c;
    case 2:
      c.model = ModelKind::PhaseFieldCrystal;
      c.model_params = {0.2, 0.0, 1.0, 1e-8, SplitChoice::Default};
      c.nx = c.ny = 128;
      c.lx = c.ly = 32.0;
      c.dt = 1.0 / 16;
      c.final_time = 1.0;
      c.steps = 16;
      c.ic = IcKind::TrigMode;
      c.ic_params = {16.0, 1.0};
      c.levels = 5;
      c.out_dir = "example2";
      return c;
    case 3:
      c.model = ModelKind::PhaseFieldCrystal;
      c.model_params = {0.025, 0.0, 1.0, 1e-8, SplitChoice::Default};
      c.scheme = SchemeKind::MieqCnLinear;
      c.s = 1.025;
      c.nx = c.ny = 128;
      c.lx = c.ly = 100.0;
      c.origin = {-50.0, -50.0};
      c.dt = 1.0;
      c.final_time = 2000.0;
      c.steps = 2000;
      c.ic = IcKind::UniformRandom;
      c.ic_params = {0.07, 0.07};
      c.snapshots = {40.0, 100.0, 200.0, 400.0, 800.0, 2000.0};
      c.out_dir = "example3";
      return c;
    case 4:
      c.model = ModelKind::SwiftHohenberg;
      c.model_params = {0.025, 2.0, 1.0, 0.0, SplitChoice::Default};
      c.scheme = SchemeKind::MsavBdf2Double;
      c.nx = c.ny = 128;
      c.lx = c.ly = 100.0;
      c.origin = {-50.0, -50.0};
      c.dt = 0.1;
      c.final_time = 100.0;
      c.steps = 1000;
      c.ic = IcKind::UniformRandom;
      c.ic_params = {0.1, 0.1};
      c.snapshots = {2.0, 8.0, 10.0, 20.0, 40.0, 100.0};
      c.out_dir = "example4";
      return c;
    default:
      throw ConfigError("no preset for example " + std::to_string(number) + " (expected 1 to 4)");
  }
}

}  // namespace qflow
