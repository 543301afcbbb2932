#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qflow/errors.hpp"
#include "qflow/harness.hpp"
#include "scenarios.hpp"

using namespace qflow;
using std::numbers::pi;

namespace {

EnergyRecord rec(long step, double e) {
  EnergyRecord r;
  r.step = step;
  r.time = 0.1 * static_cast<double>(step);
  r.energy_original = e;
  r.energy_modified = e;
  return r;
}

ExperimentConfig small_run(ModelKind mk, SchemeKind sk) {
  ExperimentConfig c;
  c.model = mk;
  c.model_params = scenario::model_params(mk);
  const SchemeConfig sc = scenario::scheme_config(sk, mk);
  c.scheme = sk;
  c.s = sc.s;
  c.c = sc.c;
  c.nx = c.ny = 32;
  c.lx = c.ly = (mk == ModelKind::AllenCahn || mk == ModelKind::CahnHilliard) ? 2.0 : 32.0;
  c.dt = 1e-2;
  c.steps = 40;
  c.ic = IcKind::SmoothRandom;
  c.ic_params = {0.3, 3.0, 0.1};
  c.seed = 77;
  c.snapshots = {0.0, 0.1, 0.4};
  return c;
}

}  // namespace

TEST_CASE("uniform stream") {
  UniformStream a(5), b(5), c(6);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.next();
    CHECK(x == b.next());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs = differs || x != c.next();
  }
  CHECK(differs);
  std::mt19937_64 raw(5);
  CHECK(UniformStream(5).next() == static_cast<double>(raw() >> 11) * 0x1.0p-53);
}

TEST_CASE("kissing bubbles") {
  // nodes at -1 + 0.2 i, so (0.4, 0) is node (7, 5)
  const Grid g = make_grid(10, 10, 2.0, 2.0, {-1.0, -1.0});
  const double params[] = {0.36, 0.01, 0.4, 0.0, -0.4, 0.0};
  const Field2D phi = initial_condition(IcKind::KissingBubbles, g, params, 1);
  CHECK(std::abs(phi(7, 5) - 1.0) <= 1e-6);
  CHECK(std::abs(phi(3, 5) - 1.0) <= 1e-6);
  CHECK(std::abs(phi(0, 0) + 1.0) <= 1e-6);
  CHECK(std::abs(phi(5, 9) + 1.0) <= 1e-6);
  const Field2D dflt = initial_condition(IcKind::KissingBubbles, g, {}, 1);
  CHECK((dflt - phi).max_abs() == 0.0);
}

TEST_CASE("uniform random data has the requested mean exactly") {
  const Grid g = make_grid(64, 64, 100.0, 100.0, {-50.0, -50.0});
  const double params[] = {0.07, 0.07};
  const Field2D phi = initial_condition(IcKind::UniformRandom, g, params, 3);
  CHECK(std::abs(phi.mean() - 0.07) <= 1e-15);
  double lo = INFINITY, hi = -INFINITY;
  for (double v : phi.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 0.07 - 0.14 - 1e-12);
  CHECK(hi <= 0.07 + 0.14 + 1e-12);
  CHECK(hi - lo > 0.1);

  const Field2D again = initial_condition(IcKind::UniformRandom, g, params, 3);
  CHECK((again - phi).max_abs() == 0.0);
  const Field2D other = initial_condition(IcKind::UniformRandom, g, params, 4);
  CHECK((other - phi).max_abs() > 0.0);
}

TEST_CASE("trig mode matches the manufactured solution at t = 0") {
  const Grid g = make_grid(32, 32, 32.0, 32.0);
  const double params[] = {16.0};
  const Field2D phi = initial_condition(IcKind::TrigMode, g, params, 0);
  CHECK((phi - manufactured_exact(g, 0.0)).max_abs() <= 1e-15);
  CHECK(phi(4, 4) == doctest::Approx(1.0));
}

TEST_CASE("smooth random data") {
  const Grid g = make_grid(32, 32, 2.0, 2.0);
  const double params[] = {0.3, 3.0, 0.1};
  const Field2D phi = initial_condition(IcKind::SmoothRandom, g, params, 9);
  CHECK(std::abs(phi.mean() - 0.1) <= 1e-12);
  CHECK(phi.max_abs() <= 0.1 + 0.3 * 9 + 1e-12);
  // band-limited: no energy beyond the requested modes
  const SymbolField lap = laplacian_symbol(g);
  const double kmax = 2 * pi * 3.0 / 2.0;
  const SymbolField high = SymbolField::from_wavenumbers(
      g, [&](double kx, double ky) { return std::abs(kx) > kmax + 1e-9 || std::abs(ky) > kmax + 1e-9 ? 1.0 : 0.0; });
  CHECK(apply_symbol(high, phi).max_abs() <= 1e-12);
}

TEST_CASE("initial condition parameter checks") {
  const Grid g = make_grid(8, 8, 1.0, 1.0);
  const double too_many[] = {1, 2, 3};
  CHECK_THROWS_AS(initial_condition(IcKind::UniformRandom, g, too_many, 1), ConfigError);
  CHECK_THROWS_AS(parse_ic_kind("gaussian"), ConfigError);
  for (IcKind k : {IcKind::KissingBubbles, IcKind::UniformRandom, IcKind::TrigMode, IcKind::SmoothRandom})
    CHECK(parse_ic_kind(to_string(k)) == k);
}

TEST_CASE("manufactured forcing examples") {
  const Grid g = make_grid(32, 32, 32.0, 32.0);
  const ModelSpec pfc = make_model(ModelKind::PhaseFieldCrystal, {.eps = 0.2}, g);
  const Field2D mode = manufactured_exact(g, 0.0);

  const Field2D f0 = manufactured_forcing(pfc, 0.0);
  const Field2D expect0 = -1.0 * apply_symbol(pfc.g_symbol(), chemical_potential(pfc, mode));
  CHECK((f0 - expect0).max_abs() <= 1e-13);

  const Field2D fh = manufactured_forcing(pfc, pi / 2);
  CHECK((fh + mode).max_abs() <= 1e-14);
}

TEST_CASE("one forced step is consistent with the manufactured solution") {
  const Grid g = make_grid(32, 32, 32.0, 32.0);
  const ModelSpec pfc = make_model(ModelKind::PhaseFieldCrystal, {.eps = 0.2}, g);
  const Forcing f = [&](double t) { return manufactured_forcing(pfc, t); };
  for (SchemeKind k : kAllSchemeKinds) {
    CAPTURE(to_string(k));
    const Scheme s(pfc, scenario::scheme_config(k, ModelKind::PhaseFieldCrystal));
    double errs[2];
    for (int level = 0; level < 2; ++level) {
      const double dt = 1e-4 / (1 << level);
      SchemeState st = s.init(manufactured_exact(g, 0.0), dt);
      s.advance(st, f);
      errs[level] = norm2(st.phi - manufactured_exact(g, dt));
    }
    CHECK(errs[0] <= 1e-6);
    // local error at least second order in dt
    CHECK(errs[0] / errs[1] >= 3.5);
  }
}

TEST_CASE("convergence study on a small grid") {
  ConvergenceStudy study;
  study.nx = study.ny = 32;
  study.final_time = 0.5;
  study.dts = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  const ConvergenceTable t = run_convergence_study(study);
  REQUIRE(t.labels.size() == 4);
  REQUIRE(t.cells.size() == 4);
  for (std::size_t c = 0; c < t.cells.size(); ++c) {
    CAPTURE(t.labels[c]);
    REQUIRE(t.cells[c].size() == 3);
    CHECK_FALSE(t.cells[c][0].rate);
    for (std::size_t r = 0; r < 3; ++r) {
      REQUIRE(t.cells[c][r].error);
      CHECK(t.cells[c][r].failure.empty());
    }
    for (std::size_t r = 1; r < 3; ++r) {
      REQUIRE(t.cells[c][r].rate);
      CHECK(*t.cells[c][r].rate == doctest::Approx(std::log2(*t.cells[c][r - 1].error / *t.cells[c][r].error)));
      CHECK(*t.cells[c][r].rate >= 1.8);
      CHECK(*t.cells[c][r].rate <= 2.2);
    }
  }
}

TEST_CASE("a failing cell does not stop the study") {
  ConvergenceStudy study;
  study.model = ModelKind::SwiftHohenberg;
  study.params = scenario::model_params(ModelKind::SwiftHohenberg);
  study.nx = study.ny = 16;
  study.final_time = 0.25;
  study.dts = {1.0 / 8, 1.0 / 16};
  SchemeConfig bad;
  bad.kind = SchemeKind::IeqCn;  // C = 0, and F < 0 wherever 0 < |phi| is small
  SchemeConfig good = scenario::scheme_config(SchemeKind::IeqCn, ModelKind::SwiftHohenberg);
  study.columns = {{"bad", bad}, {"good", good}};
  const ConvergenceTable t = run_convergence_study(study);
  for (const auto& cell : t.cells[0]) {
    CHECK_FALSE(cell.error);
    CHECK(cell.failure.find("C") != std::string::npos);
  }
  for (const auto& cell : t.cells[1]) CHECK(cell.error);
}

TEST_CASE("convergence_study_from") {
  ExperimentConfig c = example_config(2);
  const ConvergenceStudy s = convergence_study_from(c);
  CHECK(s.dts.size() == 5);
  CHECK(s.dts.front() == 1.0 / 16);
  CHECK(s.dts.back() == 1.0 / 256);
  CHECK(s.final_time == 1.0);
  CHECK(s.columns.size() == 4);
  c.scheme = SchemeKind::IeqCn;
  c.c = 1.0;
  CHECK(convergence_study_from(c).columns.size() == 1);
  c.lx = 30.0;
  CHECK_THROWS_AS(convergence_study_from(c), ConfigError);
}

TEST_CASE("assert_energy_decay") {
  std::vector<EnergyRecord> s;
  for (int i = 0; i < 10; ++i) s.push_back(rec(i, 10.0 - i));
  CHECK(assert_energy_decay(s, 1e-10).passed());
  s[6].energy_modified = s[5].energy_modified + 1e-3;
  const DecayReport r = assert_energy_decay(s, 1e-10);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0] == 6);
  CHECK(r.max_relative_increase == doctest::Approx(1e-3 / 6.0));
  CHECK(assert_energy_decay(std::vector<EnergyRecord>{rec(0, 1.0)}, 1e-10).passed());
}

TEST_CASE("stabilized SAV on Cahn-Hilliard passes the decay check") {
  ExperimentConfig c = small_run(ModelKind::CahnHilliard, SchemeKind::StabSavBdf2);
  c.steps = 200;
  c.snapshots.clear();
  const SimulationResult r = run_simulation(c);
  CHECK(r.series.size() == 201);
  CHECK(r.decay.passed());
}

TEST_CASE("run_simulation records, snapshots and determinism") {
  const ExperimentConfig c = small_run(ModelKind::PhaseFieldCrystal, SchemeKind::MsavBdf2Double);
  const SimulationResult a = run_simulation(c);
  const SimulationResult b = run_simulation(c);
  REQUIRE(a.series.size() == 41);
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    CHECK(a.series[i].step == static_cast<long>(i));
    CHECK(a.series[i].energy_modified == b.series[i].energy_modified);
    CHECK(a.series[i].r.has_value());
  }
  REQUIRE(a.snapshots.size() == 3);
  CHECK(a.snapshots[0].time == 0.0);
  CHECK(a.snapshots[1].time == doctest::Approx(0.1));
  CHECK(a.snapshots[2].time == doctest::Approx(0.4));
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    CHECK((a.snapshots[i].field - b.snapshots[i].field).max_abs() == 0.0);
    CHECK(std::abs(a.snapshots[i].field.mean() - a.snapshots[0].field.mean()) <= 1e-12);
  }
  CHECK(a.decay.passed());
}

TEST_CASE("observer can stop a run") {
  const ExperimentConfig c = small_run(ModelKind::AllenCahn, SchemeKind::IeqCn);
  int calls = 0;
  const SimulationResult r = run_simulation(c, [&](const SchemeState& s, const EnergyRecord&) {
    ++calls;
    return s.step < 5;
  });
  CHECK(calls == 6);
  CHECK(r.series.size() == 6);
}

TEST_CASE("failures carry the step index") {
  ExperimentConfig c = small_run(ModelKind::SwiftHohenberg, SchemeKind::SavCn);
  c.c = 0.0;
  c.ic = IcKind::UniformRandom;
  c.ic_params = {1.0, 0.1};
  try {
    run_simulation(c);
    FAIL("expected RadicandError");
  } catch (const RadicandError& e) {
    CHECK(std::string(e.what()).rfind("step 0: ", 0) == 0);
  }
  c.scheme.reset();
  CHECK_THROWS_AS(build_scheme(c), ConfigError);
}

TEST_CASE("example presets") {
  for (int n = 1; n <= 4; ++n) {
    const ExperimentConfig c = example_config(n);
    CHECK(c.model.has_value());
    CHECK(parse_config_text(to_config_text(c)).steps == c.steps);
  }
  const ExperimentConfig e1 = example_config(1);
  CHECK(e1.model == ModelKind::CahnHilliard);
  CHECK(e1.snapshots == std::vector<double>{0.0, 0.01, 0.02, 0.1, 0.5, 1.0});
  const ExperimentConfig e3 = example_config(3);
  CHECK(e3.dt == 1.0);
  CHECK(e3.snapshots == std::vector<double>{40.0, 100.0, 200.0, 400.0, 800.0, 2000.0});
  const ExperimentConfig e4 = example_config(4);
  CHECK(e4.scheme == SchemeKind::MsavBdf2Double);
  CHECK(e4.model_params.kappa == 0.0);
  CHECK(e4.dt == 0.1);
  CHECK(e4.snapshots == std::vector<double>{2.0, 8.0, 10.0, 20.0, 40.0, 100.0});
  CHECK_THROWS_AS(example_config(5), ConfigError);
}
