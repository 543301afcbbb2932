#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qflow/potential.hpp"
#include "qflow/spectral.hpp"

namespace qflow {

enum class ModelKind { AllenCahn, CahnHilliard, PhaseFieldCrystal, SwiftHohenberg };

/// Dissipation operator: G = -M (Allen-Cahn type) or G = M * Laplacian
/// (Cahn-Hilliard type), M being the mobility.
enum class DissipationKind { NegIdentity, Laplacian };

/// Which M(phi) a model carries for the nonlinear-M schemes.
enum class SplitChoice {
  Default,       ///< AC/CH: M = 0; PFC: (1+eps) phi^2; SH: 2 phi^3 + 4 phi^2
  Constructive,  ///< coefficient-sign construction of build_positive_split
};

struct ModelParams {
  double eps = 0.0;
  double g = 0.0;  ///< SH quadratic-cubic coupling
  double mobility = 1.0;
  double kappa = 1e-8;
  SplitChoice split = SplitChoice::Default;
};

/// Gradient flow d(phi)/dt = G (L phi + F'(phi)) with energy
/// E = 1/2 (L phi, phi) + int F(phi).
class ModelSpec {
 public:
  /// Checks L >= 0 and mobility > 0.
  ModelSpec(std::string name, SymbolField l_symbol, DissipationKind g_kind, double mobility, SplitPotential split);

  const std::string& name() const { return name_; }
  const Grid& grid() const { return l_symbol_.grid(); }
  const SymbolField& l_symbol() const { return l_symbol_; }
  /// Fourier symbol of G, mobility included: -M or -M |k|^2.
  const SymbolField& g_symbol() const { return g_symbol_; }
  DissipationKind g_kind() const { return g_kind_; }
  double mobility() const { return mobility_; }
  const SplitPotential& split() const { return split_; }
  const PolynomialPotential& potential() const { return split_.original(); }

  /// Same operators and F, different M (and kappa).
  ModelSpec with_split(SplitPotential split) const;

 private:
  std::string name_;
  SymbolField l_symbol_;
  SymbolField g_symbol_;
  DissipationKind g_kind_;
  double mobility_;
  SplitPotential split_;
};

ModelKind parse_model_kind(std::string_view s);
std::string_view to_string(ModelKind k);

/// The four phase-field models:
///   AC : L = -eps^2 Lap, G = -M,     F = (phi^2 - 1)^2 / 4
///   CH : L = -eps^2 Lap, G = M Lap,  F as AC
///   PFC: L = (1 + Lap)^2, G = M Lap, F = phi^4/4 - eps/2 phi^2
///   SH : L = (1 + Lap)^2, G = -M,    F = phi^4/4 - g/3 phi^3 - eps/2 phi^2
ModelSpec make_model(ModelKind kind, const ModelParams& params, const Grid& grid);

/// 1/2 (phi, L phi) + int F(phi)
double energy(const ModelSpec& m, const Field2D& phi);

/// L phi + F'(phi)
Field2D chemical_potential(const ModelSpec& m, const Field2D& phi);

/// One row of an energy time series. energy_modified is the scheme's
/// discrete Lyapunov functional.
struct EnergyRecord {
  long step = 0;
  double time = 0.0;
  double energy_original = 0.0;
  double energy_modified = 0.0;
  std::optional<double> r;
  std::optional<double> m;
};

}  // namespace qflow
