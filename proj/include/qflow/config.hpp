#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qflow/model.hpp"
#include "qflow/schemes.hpp"

namespace qflow {

enum class IcKind { KissingBubbles, UniformRandom, TrigMode, SmoothRandom };

IcKind parse_ic_kind(std::string_view s);
std::string_view to_string(IcKind k);

/// Everything one run needs. Parsed from `key = value` lines:
///
///   model       ac | ch | pfc | sh                      (required)
///   scheme      ieq_cn, sav_cn, ... (see SchemeKind)    (required by simulate)
///   eps, g, mobility                                    model parameters (eps 0.2, g 0, mobility 1)
///   split       default | constructive                  M(phi) of the double kinds
///   S, C, kappa                                         scheme constants (0, 0, 1e-8)
///   nx, ny, lx, ly, origin_x, origin_y                  grid (128, 128, 32, 32, 0, 0)
///   dt, steps, final_time                               time stepping (1e-3, 100, unset)
///   ic, ic_params, seed                                 initial data (smooth_random, none, 1)
///   snapshots                                           comma-separated times
///   out_dir                                             output directory ("out")
///   monitor     on | off                                abort on energy increase (off)
///   levels                                              dt halvings of `converge` (5)
///
/// `#` starts a comment. When final_time is given, steps = final_time / dt
/// (which must be an integer up to 1e-9 relative); giving both must agree.
struct ExperimentConfig {
  std::optional<ModelKind> model;
  ModelParams model_params{0.2, 0.0, 1.0, 1e-8, SplitChoice::Default};
  std::optional<SchemeKind> scheme;
  double s = 0.0;
  double c = 0.0;
  std::size_t nx = 128;
  std::size_t ny = 128;
  double lx = 32.0;
  double ly = 32.0;
  std::array<double, 2> origin{0.0, 0.0};
  double dt = 1e-3;
  long steps = 100;
  std::optional<double> final_time;
  IcKind ic = IcKind::SmoothRandom;
  std::vector<double> ic_params;
  std::uint64_t seed = 1;
  std::vector<double> snapshots;
  std::string out_dir = "out";
  bool monitor = false;
  int levels = 5;

  /// Scheme constants in the form the integrators take.
  SchemeConfig scheme_config() const;
  double end_time() const { return static_cast<double>(steps) * dt; }
};

/// Parses config text; `origin` names the source in error messages.
/// Errors (ConfigError) carry the line number: unknown or repeated keys,
/// malformed values, missing `model`, inconsistent steps / final_time,
/// snapshot times outside [0, T].
ExperimentConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

/// Reads and parses a config file (IoError if it cannot be read).
ExperimentConfig parse_config(const std::string& path);

/// The fully resolved config, defaults included, in the parseable format;
/// parse_config_text(to_config_text(c)) reproduces c exactly.
std::string to_config_text(const ExperimentConfig& cfg);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
/// Locale-independent parse of the whole string; nullopt on any junk.
std::optional<double> parse_double(std::string_view s);

}  // namespace qflow
