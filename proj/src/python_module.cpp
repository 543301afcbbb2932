// Python extension: configs, whole runs, step-by-step integration and file readers.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "qflow/config.hpp"
#include "qflow/errors.hpp"
#include "qflow/harness.hpp"
#include "qflow/io.hpp"
#include "qflow/potential.hpp"

namespace py = pybind11;
using namespace qflow;

namespace {

py::array_t<double> to_array(const Field2D& f) {
  py::array_t<double> out({f.grid().nx(), f.grid().ny()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Field2D from_array(const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != g.nx() || static_cast<std::size_t>(a.shape(1)) != g.ny())
    throw ConfigError("expected an array of shape (" + std::to_string(g.nx()) + ", " + std::to_string(g.ny()) + ")");
  return Field2D(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict series_dict(const std::vector<EnergyRecord>& series) {
  const auto n = static_cast<py::ssize_t>(series.size());
  py::array_t<long> step(n);
  py::array_t<double> time(n), original(n), modified(n);
  for (py::ssize_t i = 0; i < n; ++i) {
    const EnergyRecord& r = series[static_cast<std::size_t>(i)];
    step.mutable_at(i) = r.step;
    time.mutable_at(i) = r.time;
    original.mutable_at(i) = r.energy_original;
    modified.mutable_at(i) = r.energy_modified;
  }
  py::dict d;
  d["step"] = step;
  d["time"] = time;
  d["energy_original"] = original;
  d["energy_modified"] = modified;
  return d;
}

/// One integration driven from Python: the scheme built from a config plus
/// its evolving state.
class Simulation {
 public:
  explicit Simulation(const ExperimentConfig& cfg)
      : cfg_(cfg), scheme_(std::make_unique<Scheme>(build_scheme(cfg))),
        state_(scheme_->init(initial_condition(cfg.ic, scheme_->model().grid(), cfg.ic_params, cfg.seed), cfg.dt)) {}

  py::dict advance(long n) {
    std::vector<EnergyRecord> records;
    {
      py::gil_scoped_release release;
      for (long k = 0; k < n; ++k) records.push_back(scheme_->advance(state_));
    }
    return series_dict(records);
  }

  py::array_t<double> phi() const { return to_array(state_.phi); }
  void set_phi(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    state_ = scheme_->init(from_array(scheme_->model().grid(), a), cfg_.dt);
  }
  long step() const { return state_.step; }
  double time() const { return state_.time(); }
  double energy() const { return qflow::energy(scheme_->model(), state_.phi); }
  double modified_energy() const { return scheme_->modified_energy(state_); }

 private:
  ExperimentConfig cfg_;
  std::unique_ptr<Scheme> scheme_;
  SchemeState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-stable integrators for phase-field gradient flows";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<RadicandError>(m, "RadicandError", numerical.ptr());
  py::register_exception<SolverError>(m, "SolverError", numerical.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<ExperimentConfig>(m, "Config")
      .def_readwrite("dt", &ExperimentConfig::dt)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("nx", &ExperimentConfig::nx)
      .def_readwrite("ny", &ExperimentConfig::ny)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("s", &ExperimentConfig::s)
      .def_readwrite("c", &ExperimentConfig::c)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("snapshots", &ExperimentConfig::snapshots)
      .def_property(
          "final_time", [](const ExperimentConfig& c) { return c.final_time; },
          [](ExperimentConfig& c, std::optional<double> t) { c.final_time = t; })
      .def_property_readonly("model",
                             [](const ExperimentConfig& c) {
                               return c.model ? std::string(to_string(*c.model)) : std::string();
                             })
      .def_property(
          "scheme",
          [](const ExperimentConfig& c) { return c.scheme ? std::string(to_string(*c.scheme)) : std::string(); },
          [](ExperimentConfig& c, const std::string& s) { c.scheme = parse_scheme_kind(s); })
      .def("to_text", &to_config_text)
      .def("__repr__", [](const ExperimentConfig& c) { return "Config(\n" + to_config_text(c) + ")"; });

  m.def("parse_config_text", [](const std::string& text) { return parse_config_text(text); }, py::arg("text"));
  m.def("load_config", &parse_config, py::arg("path"));
  m.def("example_config", &example_config, py::arg("number"));

  m.def(
      "run",
      [](const ExperimentConfig& cfg) {
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = run_simulation(cfg);
        }
        py::dict out = series_dict(r.series);
        py::list snaps;
        for (const Snapshot& s : r.snapshots) snaps.append(py::make_tuple(s.time, to_array(s.field)));
        out["snapshots"] = snaps;
        return out;
      },
      py::arg("config"), "Run a config in memory; energies per step and the captured snapshots.");
  m.def(
      "simulate_to_disk",
      [](const ExperimentConfig& cfg) {
        py::gil_scoped_release release;
        simulate_to_disk(cfg);
      },
      py::arg("config"), "Run a config and write its outputs into config.out_dir.");

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<const ExperimentConfig&>(), py::arg("config"))
      .def("advance", &Simulation::advance, py::arg("n") = 1)
      .def_property("phi", &Simulation::phi, &Simulation::set_phi)
      .def_property_readonly("step", &Simulation::step)
      .def_property_readonly("time", &Simulation::time)
      .def_property_readonly("energy", &Simulation::energy)
      .def_property_readonly("modified_energy", &Simulation::modified_energy);

  m.def(
      "positive_split",
      [](const std::vector<double>& coeffs, double kappa) {
        const SplitPotential sp = build_positive_split(PolynomialPotential(coeffs), kappa);
        auto vec = [](const PolynomialPotential& p) { return std::vector<double>(p.coeffs().begin(), p.coeffs().end()); };
        return py::make_tuple(vec(sp.ftilde()), vec(sp.m()));
      },
      py::arg("coeffs"), py::arg("kappa") = 1e-8,
      "Ascending coefficients of F -> (Ftilde, M) with Ftilde = F + M and both non-negative.");

  m.def(
      "read_snapshot",
      [](const std::string& path) {
        const SnapshotData d = read_snapshot(path);
        py::dict h;
        h["nx"] = d.header.nx;
        h["ny"] = d.header.ny;
        h["lx"] = d.header.lx;
        h["ly"] = d.header.ly;
        h["origin"] = d.header.origin;
        h["time"] = d.header.time;
        h["model"] = d.header.model;
        h["scheme"] = d.header.scheme;
        py::array_t<double> a({d.header.nx, d.header.ny});
        std::copy(d.values.begin(), d.values.end(), a.mutable_data());
        return py::make_tuple(h, a);
      },
      py::arg("path"));
  m.def(
      "read_energy_series", [](const std::string& path) { return series_dict(read_energy_series(path)); },
      py::arg("path"));
}
