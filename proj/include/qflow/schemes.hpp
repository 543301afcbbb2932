#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "qflow/linear_solvers.hpp"
#include "qflow/model.hpp"

namespace qflow {

/// The second-order semi-implicit integrators.
///
/// Crank-Nicolson, pointwise auxiliary field q (and u):
///   IeqCn          q = sqrt(F + C)
///   StabIeqCn      as IeqCn plus S (phi^{n+1} - phi^n) in mu
///   MieqCnDouble   q = sqrt(Ftilde + kappa), u = sqrt(M + kappa), M from the model
///   MieqCnLinear   q = sqrt(F + S phi^2 + kappa), -2 S phi explicit in mu
/// Crank-Nicolson, scalar auxiliary r:
///   SavCn          r = sqrt(E1 + C)
/// BDF2, scalar auxiliaries (backward-Euler first step):
///   MsavBdf2Double r = sqrt(E1 + E0 + kappa), m = sqrt(E0 + kappa)
///   SavBdf2Linear  r = sqrt(E1 + S |phi|^2 + kappa), -2 S phi explicit in mu
///   StabSavBdf2    r = sqrt(E1 + C) plus S (phi^{n+1} - 2 phi^n + phi^{n-1}) in mu
enum class SchemeKind {
  IeqCn,
  SavCn,
  MieqCnDouble,
  MieqCnLinear,
  MsavBdf2Double,
  SavBdf2Linear,
  StabIeqCn,
  StabSavBdf2,
};

inline constexpr SchemeKind kAllSchemeKinds[] = {
    SchemeKind::IeqCn,          SchemeKind::SavCn,         SchemeKind::MieqCnDouble, SchemeKind::MieqCnLinear,
    SchemeKind::MsavBdf2Double, SchemeKind::SavBdf2Linear, SchemeKind::StabIeqCn,    SchemeKind::StabSavBdf2,
};

SchemeKind parse_scheme_kind(std::string_view s);
std::string_view to_string(SchemeKind k);

bool is_crank_nicolson(SchemeKind k);
/// Kinds carrying pointwise auxiliary fields (q, u).
bool is_ieq(SchemeKind k);

/// Which formula modified_energy evaluates for the BDF2 kinds.
enum class EnergyConvention {
  /// Coefficients that follow from the BDF2 identity
  /// (x, 3x-4y+z) = 1/2(|x|^2+|2x-y|^2) - 1/2(|y|^2+|2y-z|^2) + 1/2|x-2y+z|^2,
  /// halved so that the value is comparable to the original energy.
  ProofConsistent,
  /// Alternative coefficient set for the MSAV-double and SAV-linear energies;
  /// for every other kind identical to ProofConsistent.
  Printed,
};

struct SchemeConfig {
  SchemeKind kind = SchemeKind::IeqCn;
  double s = 0.0;  ///< stabilization / quadratic-split parameter S
  double c = 0.0;  ///< shift constant C of the classical kinds
  /// Regularizer of the modified kinds; unset means the model split's kappa.
  std::optional<double> kappa;
  KrylovOptions krylov{1e-12, 50, 500};
};

/// Evolving state of one integration. Optional members are engaged exactly
/// when the scheme kind carries them.
struct SchemeState {
  Field2D phi;
  std::optional<Field2D> phi_prev;
  std::optional<Field2D> q;
  std::optional<Field2D> u;
  std::optional<double> r;
  std::optional<double> m;
  std::optional<double> r_prev;
  std::optional<double> m_prev;
  long step = 0;
  double dt = 0.0;

  double time() const { return static_cast<double>(step) * dt; }
};

/// Additive source term of the phi equation, evaluated at a time level.
using Forcing = std::function<Field2D(double)>;

/// A scheme bound to a model. Stateless apart from precomputed symbols;
/// const member functions may be called from several threads on distinct
/// states.
class Scheme {
 public:
  Scheme(ModelSpec model, SchemeConfig cfg);

  const ModelSpec& model() const { return model_; }
  const SchemeConfig& config() const { return cfg_; }
  SchemeKind kind() const { return cfg_.kind; }
  double kappa() const { return kappa_; }

  /// Builds the initial auxiliaries: q0 = sqrt(P(phi0) + c), u0 = sqrt(M(phi0) + kappa),
  /// r0 = sqrt(int P(phi0) + c), m0 = sqrt(E0(phi0) + kappa).
  SchemeState init(const Field2D& phi0, double dt) const;

  /// Advances one step and returns the record of the new state.
  EnergyRecord advance(SchemeState& state, const Forcing& forcing = {}) const;

  double modified_energy(const SchemeState& state, EnergyConvention conv = EnergyConvention::ProofConsistent) const;
  EnergyRecord record(const SchemeState& state) const;

  /// The polynomial P under the square root and its shift (C or kappa).
  const PolynomialPotential& quadratized() const { return p_; }
  double shift() const { return shift_; }

 private:
  Field2D predictor(const SchemeState& s, const Forcing& forcing) const;
  void advance_cn_ieq(SchemeState& s, const Forcing& forcing) const;
  void advance_sav_cn(SchemeState& s, const Forcing& forcing) const;
  void advance_bdf2_sav(SchemeState& s, const Forcing& forcing) const;

  /// b = P'(phi)/sqrt(int P(phi) + shift), zero where the 0/0 limit applies.
  Field2D sav_vector(const PolynomialPotential& p, double shift, const Field2D& phi, const char* name) const;

  ModelSpec model_;
  SchemeConfig cfg_;
  double kappa_;
  PolynomialPotential p_;  ///< F, Ftilde or F + S phi^2
  double shift_;
  const char* shift_name_;
  PolynomialPotential m_;  ///< second auxiliary density (double kinds)
  double s_linear_ = 0.0;  ///< S of the explicit -2 S phi term
  double s_stab_ = 0.0;    ///< stabilizer S
  SymbolField gl_;         ///< G * L
};

/// Free-function surface mirroring the module operations.
SchemeState init_state(const Scheme& scheme, const Field2D& phi0, double dt);
double modified_energy(const SchemeState& state, const Scheme& scheme,
                       EnergyConvention conv = EnergyConvention::ProofConsistent);

}  // namespace qflow
