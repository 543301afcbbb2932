#include "qflow/model.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

namespace {

SymbolField make_g_symbol(const Grid& grid, DissipationKind kind, double mobility) {
  if (kind == DissipationKind::NegIdentity) return SymbolField(grid, -mobility);
  SymbolField s = laplacian_symbol(grid);
  for (auto& v : s.values()) v *= mobility;
  return s;
}

}  // namespace

ModelSpec::ModelSpec(std::string name, SymbolField l_symbol, DissipationKind g_kind, double mobility,
                     SplitPotential split)
    : name_(std::move(name)),
      l_symbol_(std::move(l_symbol)),
      g_symbol_(make_g_symbol(l_symbol_.grid(), g_kind, mobility)),
      g_kind_(g_kind),
      mobility_(mobility),
      split_(std::move(split)) {
  if (!(mobility > 0.0)) throw ConfigError("mobility must be positive");
  if (l_symbol_.min() < 0.0) throw ConfigError("model " + name_ + ": linear operator L must be non-negative");
}

ModelSpec ModelSpec::with_split(SplitPotential split) const {
  ModelSpec out = *this;
  out.split_ = std::move(split);
  return out;
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "ac" || s == "allen_cahn") return ModelKind::AllenCahn;
  if (s == "ch" || s == "cahn_hilliard") return ModelKind::CahnHilliard;
  if (s == "pfc" || s == "phase_field_crystal") return ModelKind::PhaseFieldCrystal;
  if (s == "sh" || s == "swift_hohenberg") return ModelKind::SwiftHohenberg;
  throw ConfigError("unknown model kind '" + std::string(s) + "' (expected ac, ch, pfc or sh)");
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::AllenCahn: return "ac";
    case ModelKind::CahnHilliard: return "ch";
    case ModelKind::PhaseFieldCrystal: return "pfc";
    case ModelKind::SwiftHohenberg: return "sh";
  }
  return "?";
}

ModelSpec make_model(ModelKind kind, const ModelParams& p, const Grid& grid) {
  if (!(p.eps > 0.0)) throw ConfigError("model parameter eps must be positive");
  if (!(p.mobility > 0.0)) throw ConfigError("model parameter mobility must be positive");
  const SymbolField lap = laplacian_symbol(grid);

  SymbolField l_symbol(grid);
  DissipationKind g_kind{};
  PolynomialPotential f;
  PolynomialPotential default_m;
  switch (kind) {
    case ModelKind::AllenCahn:
    case ModelKind::CahnHilliard: {
      const std::array<double, 2> poly{0.0, -p.eps * p.eps};
      l_symbol = compose_symbol(lap, poly);
      g_kind = kind == ModelKind::AllenCahn ? DissipationKind::NegIdentity : DissipationKind::Laplacian;
      f = PolynomialPotential({0.25, 0.0, -0.5, 0.0, 0.25});
      break;
    }
    case ModelKind::PhaseFieldCrystal:
    case ModelKind::SwiftHohenberg: {
      const std::array<double, 3> poly{1.0, 2.0, 1.0};  // (1 + s)^2
      l_symbol = compose_symbol(lap, poly);
      if (kind == ModelKind::PhaseFieldCrystal) {
        g_kind = DissipationKind::Laplacian;
        f = PolynomialPotential({0.0, 0.0, -0.5 * p.eps, 0.0, 0.25});
        default_m = PolynomialPotential({0.0, 0.0, 1.0 + p.eps});
      } else {
        if (p.g < 0.0) throw ConfigError("Swift-Hohenberg parameter g must be non-negative");
        g_kind = DissipationKind::NegIdentity;
        f = PolynomialPotential({0.0, 0.0, -0.5 * p.eps, -p.g / 3.0, 0.25});
        default_m = PolynomialPotential({0.0, 0.0, 4.0, 2.0});
      }
      break;
    }
  }
  // (1 + s)^2 is evaluated as 1 + 2s + s^2 and can round to -1e-16 near |k| = 1.
  for (auto& v : l_symbol.values()) v = std::max(v, 0.0);

  SplitPotential split = p.split == SplitChoice::Constructive ? build_positive_split(f, p.kappa)
                                                              : custom_split(f, default_m, p.kappa);
  return ModelSpec(std::string(to_string(kind)), std::move(l_symbol), g_kind, p.mobility, std::move(split));
}

double energy(const ModelSpec& m, const Field2D& phi) {
  const Field2D lphi = apply_symbol(m.l_symbol(), phi);
  return 0.5 * inner(phi, lphi) + integrate(eval_poly(m.potential(), phi, 0));
}

Field2D chemical_potential(const ModelSpec& m, const Field2D& phi) {
  Field2D mu = apply_symbol(m.l_symbol(), phi);
  mu += eval_poly(m.potential(), phi, 1);
  return mu;
}

}  // namespace qflow
