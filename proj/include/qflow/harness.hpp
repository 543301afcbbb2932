#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qflow/config.hpp"
#include "qflow/schemes.hpp"

namespace qflow {

/// Seeded uniform samples. The stream is std::mt19937_64 seeded with `seed`;
/// every draw takes one raw 64-bit output x and returns (x >> 11) * 2^-53,
/// so a given seed yields the same sequence on every platform.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  /// [0, 1)
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// [-1, 1)
  double next_signed() { return 2.0 * next() - 1.0; }

 private:
  std::mt19937_64 engine_;
};

/// Builds the initial field. Parameters are positional and optional; missing
/// trailing entries take the defaults below, extra entries are an error.
///   kissing_bubbles  R0=0.36 eps=0.01 x1=0.4 y1=0 x2=-0.4 y2=0
///                    sum_i -tanh((|x - x_i| - R0) / (sqrt(2) eps)) + 1
///   uniform_random   mean=0 amplitude=1
///                    mean + amplitude * (U - avg U), U iid on [-1, 1)
///   trig_mode        period=16 amplitude=1
///                    amplitude * sin(2 pi x / period) sin(2 pi y / period)
///   smooth_random    amplitude=0.3 modes=3 mean=0
///                    mean + sum_{a,b <= modes} c_ab sin(2 pi a x / lx + p_ab) sin(2 pi b y / ly + s_ab)
///                    with c_ab uniform in [-amplitude, amplitude) and phases in [0, 2 pi)
Field2D initial_condition(IcKind kind, const Grid& grid, std::span<const double> params, std::uint64_t seed);

/// Exact solution of the manufactured problem:
/// cos(t) sin(2 pi x / 16) sin(2 pi y / 16).
Field2D manufactured_exact(const Grid& grid, double t);

/// Source term making manufactured_exact a solution of model m:
/// f = d(phi_e)/dt - G mu(phi_e), with mu evaluated spectrally.
Field2D manufactured_forcing(const ModelSpec& m, double t);

struct ConvergenceColumn {
  std::string label;
  SchemeConfig scheme;
};

/// IEQ-CN (C = 1), MIEQ-CN linear (S = 1.2), SAV-BDF2 (stabilized kind with
/// S = 0, C = 10) and MSAV-BDF2 with the model's M. The modified kinds use
/// the model's kappa.
std::vector<ConvergenceColumn> default_convergence_columns();

struct ConvergenceCell {
  double dt = 0.0;
  std::optional<double> error;
  std::optional<double> rate;  ///< log2(previous error / error)
  std::string failure;         ///< diagnostic when the cell's run failed
};

struct ConvergenceTable {
  std::vector<double> dts;
  std::vector<std::string> labels;
  /// cells[column][row], rows following dts.
  std::vector<std::vector<ConvergenceCell>> cells;
};

struct ConvergenceStudy {
  ModelKind model = ModelKind::PhaseFieldCrystal;
  ModelParams params{0.2, 0.0, 1.0, 1e-8, SplitChoice::Default};
  std::size_t nx = 128;
  std::size_t ny = 128;
  double lx = 32.0;
  double ly = 32.0;
  std::array<double, 2> origin{0.0, 0.0};
  double final_time = 1.0;
  std::vector<double> dts{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  std::vector<ConvergenceColumn> columns = default_convergence_columns();
};

/// Integrates the manufactured problem from its exact initial state for
/// every (column, dt) cell and records ||phi(T) - phi_e(T)||. A failing cell
/// stores its diagnostic and leaves the rest of the study running.
ConvergenceTable run_convergence_study(const ConvergenceStudy& study);

/// The study described by a config: model and grid from the config, final
/// time from final_time (1 when unset), dt halved `levels - 1` times, the
/// default columns unless a scheme is set explicitly. The domain edges must
/// be multiples of the manufactured period 16.
ConvergenceStudy convergence_study_from(const ExperimentConfig& cfg);

struct DecayReport {
  /// Indices i (into the series) where E_mod[i] - E_mod[i-1] > tol (1 + |E_mod[i-1]|).
  std::vector<std::size_t> violations;
  double max_relative_increase = 0.0;
  bool passed() const { return violations.empty(); }
};

DecayReport assert_energy_decay(std::span<const EnergyRecord> series, double tol);

struct Snapshot {
  double time = 0.0;
  Field2D field;
};

struct SimulationResult {
  std::vector<EnergyRecord> series;
  std::vector<Snapshot> snapshots;
  DecayReport decay;
};

/// Per-step hook; returning false stops the run early.
using StepObserver = std::function<bool(const SchemeState&, const EnergyRecord&)>;

ModelSpec build_model(const ExperimentConfig& cfg);
Scheme build_scheme(const ExperimentConfig& cfg);

/// Steps the configured scheme from the configured initial data, recording
/// every step and capturing snapshots at the scheduled times (nearest step).
/// With cfg.monitor set, a modified-energy increase beyond 1e-10 relative
/// aborts with NumericalError naming the step. Solver and radicand failures
/// are rethrown with the step index prepended.
SimulationResult run_simulation(const ExperimentConfig& cfg, const StepObserver& observer = {});

/// Writes `config.resolved` (to_config_text of cfg), `energy.csv` and one
/// `snapshot_NNN.qfld` per captured snapshot into cfg.out_dir. The caller
/// is expected to hold the directory's RunLock.
void write_run_outputs(const ExperimentConfig& cfg, const SimulationResult& result);

/// Claims cfg.out_dir, runs, writes the outputs, releases the claim.
SimulationResult simulate_to_disk(const ExperimentConfig& cfg, const StepObserver& observer = {});

/// Preset configurations of the reference scenarios: 1 (two kissing bubbles,
/// Cahn-Hilliard), 2 (manufactured PFC convergence), 3 (PFC crystal growth),
/// 4 (Swift-Hohenberg patterns). ConfigError for other numbers.
ExperimentConfig example_config(int number);

}  // namespace qflow
