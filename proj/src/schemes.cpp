#include "qflow/schemes.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "qflow/errors.hpp"

namespace qflow {

SchemeKind parse_scheme_kind(std::string_view s) {
  for (SchemeKind k : kAllSchemeKinds)
    if (to_string(k) == s) return k;
  std::string known;
  for (SchemeKind k : kAllSchemeKinds) {
    if (!known.empty()) known += ", ";
    known += to_string(k);
  }
  throw ConfigError("unknown scheme '" + std::string(s) + "' (expected one of " + known + ")");
}

std::string_view to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::IeqCn: return "ieq_cn";
    case SchemeKind::SavCn: return "sav_cn";
    case SchemeKind::MieqCnDouble: return "mieq_cn_double";
    case SchemeKind::MieqCnLinear: return "mieq_cn_linear";
    case SchemeKind::MsavBdf2Double: return "msav_bdf2_double";
    case SchemeKind::SavBdf2Linear: return "sav_bdf2_linear";
    case SchemeKind::StabIeqCn: return "stab_ieq_cn";
    case SchemeKind::StabSavBdf2: return "stab_sav_bdf2";
  }
  return "?";
}

bool is_crank_nicolson(SchemeKind k) {
  return k == SchemeKind::IeqCn || k == SchemeKind::SavCn || k == SchemeKind::MieqCnDouble ||
         k == SchemeKind::MieqCnLinear || k == SchemeKind::StabIeqCn;
}

bool is_ieq(SchemeKind k) { return is_crank_nicolson(k) && k != SchemeKind::SavCn; }

namespace {

bool is_double(SchemeKind k) { return k == SchemeKind::MieqCnDouble || k == SchemeKind::MsavBdf2Double; }

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << "scheme parameter " << name << " must be finite and non-negative, got " << v;
    throw ConfigError(os.str());
  }
}

double integral_scale(const PolynomialPotential& p, const Field2D& phi, double shift) {
  double s = 0.0;
  for (double v : phi.values()) s += p.magnitude(v);
  return 1.0 + s * phi.grid().cell_area() + std::abs(shift);
}

double scalar_sqrt(const PolynomialPotential& p, double shift, const Field2D& phi, const char* what,
                   const char* name) {
  const double e = integrate(eval_poly(p, phi, 0));
  return guarded_sqrt(e + shift, integral_scale(p, phi, shift), what, name);
}

}  // namespace

Scheme::Scheme(ModelSpec model, SchemeConfig cfg)
    : model_(std::move(model)),
      cfg_(cfg),
      kappa_(cfg.kappa.value_or(model_.split().kappa())),
      shift_(0.0),
      shift_name_("C"),
      gl_(multiply_symbols(model_.g_symbol(), model_.l_symbol())) {
  require_finite_nonneg(cfg_.s, "S");
  require_finite_nonneg(cfg_.c, "C");
  require_finite_nonneg(kappa_, "kappa");
  const PolynomialPotential& f = model_.potential();
  switch (cfg_.kind) {
    case SchemeKind::IeqCn:
    case SchemeKind::SavCn:
      p_ = f;
      shift_ = cfg_.c;
      break;
    case SchemeKind::StabIeqCn:
    case SchemeKind::StabSavBdf2:
      p_ = f;
      shift_ = cfg_.c;
      s_stab_ = cfg_.s;
      break;
    case SchemeKind::MieqCnDouble:
    case SchemeKind::MsavBdf2Double:
      p_ = model_.split().ftilde();
      m_ = model_.split().m();
      shift_ = kappa_;
      shift_name_ = "kappa";
      break;
    case SchemeKind::MieqCnLinear:
    case SchemeKind::SavBdf2Linear: {
      const SplitPotential sp = quadratic_split(f, cfg_.s, kappa_);
      p_ = sp.ftilde();
      shift_ = kappa_;
      shift_name_ = "kappa";
      s_linear_ = cfg_.s;
      break;
    }
  }
}

SchemeState Scheme::init(const Field2D& phi0, double dt) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  require_same_grid(phi0.grid(), model_.grid(), "Scheme::init");
  if (!phi0.all_finite()) throw NumericalError("initial condition contains non-finite values");
  SchemeState s{phi0, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  s.dt = dt;
  if (is_ieq(cfg_.kind)) {
    s.q = sqrt_field(p_, shift_, phi0, shift_name_);
    if (is_double(cfg_.kind)) s.u = sqrt_field(m_, kappa_, phi0, "kappa");
  } else {
    s.r = scalar_sqrt(p_, shift_, phi0, "initial r", shift_name_);
    if (is_double(cfg_.kind)) s.m = scalar_sqrt(m_, kappa_, phi0, "initial m (E0 + kappa)", "kappa");
  }
  return s;
}

Field2D Scheme::sav_vector(const PolynomialPotential& p, double shift, const Field2D& phi, const char* name) const {
  const double e = integrate(eval_poly(p, phi, 0));
  const double rad = e + shift;
  const double root = guarded_sqrt(rad, integral_scale(p, phi, shift), "scalar auxiliary", name);
  Field2D dp = eval_poly(p, phi, 1);
  if (std::abs(rad) < 1e-14 && dp.max_abs() < 1e-14) return Field2D(phi.grid());
  dp *= 1.0 / root;
  if (!dp.all_finite()) throw NumericalError("scalar auxiliary: non-finite P'/sqrt(E + shift)");
  return dp;
}

// First-step extrapolation: one semi-implicit Euler solve over dt/2 (CN)
// or dt (BDF2) with F' lagged at phi^0.
Field2D Scheme::predictor(const SchemeState& s, const Forcing& forcing) const {
  const bool cn = is_crank_nicolson(cfg_.kind);
  if (s.step >= 1) {
    if (cn) return 1.5 * s.phi - 0.5 * *s.phi_prev;
    return 2.0 * s.phi - *s.phi_prev;
  }
  const double tau = cn ? 0.5 * s.dt : s.dt;
  Field2D rhs = apply_symbol(model_.g_symbol(), eval_poly(model_.potential(), s.phi, 1));
  rhs.axpy(1.0 / tau, s.phi);
  if (forcing) rhs += forcing(s.time() + tau);
  return solve_shifted(1.0 / tau, gl_, rhs);
}

void Scheme::advance_cn_ieq(SchemeState& s, const Forcing& forcing) const {
  const Field2D tilde = predictor(s, forcing);
  const Field2D b = 2.0 * sqrt_ratio(p_, shift_, tilde, shift_name_);
  std::optional<Field2D> d;
  if (s.u) d = 2.0 * sqrt_ratio(m_, kappa_, tilde, "kappa");

  // mu^{n+1/2} with the unknown increment delta removed, times two.
  Field2D mu = apply_symbol(model_.l_symbol(), s.phi);
  mu += hadamard(b, *s.q);
  if (d) mu -= hadamard(*d, *s.u);
  if (s_linear_ > 0.0) mu.axpy(-2.0 * s_linear_, s.step == 0 ? s.phi : tilde);
  Field2D rhs = apply_symbol(model_.g_symbol(), mu);
  if (forcing) rhs += forcing(s.time() + 0.5 * s.dt);
  rhs *= 2.0;

  const VariableCoeffOperator op(2.0 / s.dt, model_.g_symbol(), shift_symbol(model_.l_symbol(), 2.0 * s_stab_), b, d);
  const Field2D delta = solve_variable_coeff(op, rhs, cfg_.krylov);

  s.phi_prev = s.phi;
  s.phi += delta;
  s.q->axpy(1.0, hadamard(0.5 * b, delta));
  if (d) s.u->axpy(1.0, hadamard(0.5 * *d, delta));
}

void Scheme::advance_sav_cn(SchemeState& s, const Forcing& forcing) const {
  const Field2D tilde = predictor(s, forcing);
  const Field2D b = sav_vector(p_, shift_, tilde, shift_name_);

  Field2D mu = apply_symbol(model_.l_symbol(), s.phi);
  mu.axpy(*s.r, b);
  Field2D rhs = apply_symbol(model_.g_symbol(), mu);
  if (forcing) rhs += forcing(s.time() + 0.5 * s.dt);
  rhs *= 2.0;

  const std::vector<RankTerm> terms{{b, -0.5}};
  const Field2D delta = solve_rank_corrected(2.0 / s.dt, model_.g_symbol(), model_.l_symbol(), terms, rhs);

  s.phi_prev = s.phi;
  s.phi += delta;
  s.r_prev = s.r;
  *s.r += 0.5 * inner(b, delta);
}

void Scheme::advance_bdf2_sav(SchemeState& s, const Forcing& forcing) const {
  const Field2D tilde = predictor(s, forcing);
  const Field2D b = sav_vector(p_, shift_, tilde, shift_name_);
  const bool dbl = s.m.has_value();
  std::optional<Field2D> d;
  if (dbl) d = sav_vector(m_, kappa_, tilde, "kappa");

  const bool first = s.step == 0;
  const double alpha = first ? 1.0 / s.dt : 1.5 / s.dt;
  double rho_r = *s.r;
  double rho_m = dbl ? *s.m : 0.0;
  Field2D mu = apply_symbol(model_.l_symbol(), s.phi);
  Field2D rhs(s.phi.grid());
  if (first) {
    mu.axpy(-2.0 * s_linear_, s.phi);
  } else {
    const Field2D diff = s.phi - *s.phi_prev;
    rho_r = (4.0 * *s.r - *s.r_prev) / 3.0 - inner(b, diff) / 6.0;
    if (dbl) rho_m = (4.0 * *s.m - *s.m_prev) / 3.0 - inner(*d, diff) / 6.0;
    mu.axpy(-s_stab_, diff);
    mu.axpy(-2.0 * s_linear_, tilde);
    rhs.axpy(0.5 / s.dt, diff);
  }
  mu.axpy(rho_r, b);
  if (dbl) mu.axpy(-rho_m, *d);
  rhs += apply_symbol(model_.g_symbol(), mu);
  if (forcing) rhs += forcing(s.time() + s.dt);

  std::vector<RankTerm> terms{{b, -0.5}};
  if (dbl) terms.push_back({*d, 0.5});
  const Field2D delta = solve_rank_corrected(alpha, model_.g_symbol(), shift_symbol(model_.l_symbol(), s_stab_),
                                             terms, rhs);

  s.phi_prev = s.phi;
  s.phi += delta;
  s.r_prev = s.r;
  s.r = rho_r + 0.5 * inner(b, delta);
  if (dbl) {
    s.m_prev = s.m;
    s.m = rho_m + 0.5 * inner(*d, delta);
  }
}

EnergyRecord Scheme::advance(SchemeState& state, const Forcing& forcing) const {
  require_same_grid(state.phi.grid(), model_.grid(), "Scheme::advance");
  if (is_ieq(cfg_.kind))
    advance_cn_ieq(state, forcing);
  else if (cfg_.kind == SchemeKind::SavCn)
    advance_sav_cn(state, forcing);
  else
    advance_bdf2_sav(state, forcing);
  ++state.step;
  if (!state.phi.all_finite()) {
    std::ostringstream os;
    os << "solution became non-finite at step " << state.step;
    throw NumericalError(os.str());
  }
  return record(state);
}

double Scheme::modified_energy(const SchemeState& s, EnergyConvention conv) const {
  const SymbolField& l = model_.l_symbol();
  auto quad = [&](const Field2D& f) { return inner(f, apply_symbol(l, f)); };
  auto sq = [](const Field2D& f) { return inner(f, f); };
  const double lphi = quad(s.phi);

  if (is_ieq(cfg_.kind)) {
    double e = 0.5 * lphi + sq(*s.q);
    if (s.u) e -= sq(*s.u);
    if (s_linear_ > 0.0) {
      e -= s_linear_ * sq(s.phi);
      if (s.step >= 1) e += 0.5 * s_linear_ * sq(s.phi - *s.phi_prev);
    }
    return e;
  }
  const double r = *s.r;
  const double m = s.m.value_or(0.0);
  if (cfg_.kind == SchemeKind::SavCn) return 0.5 * lphi + r * r;

  const bool printed = conv == EnergyConvention::Printed &&
                       (cfg_.kind == SchemeKind::MsavBdf2Double || cfg_.kind == SchemeKind::SavBdf2Linear);
  if (s.step == 0) {
    if (printed && cfg_.kind == SchemeKind::MsavBdf2Double) return 0.5 * (lphi + r * r - m * m);
    return 0.5 * lphi + r * r - m * m - s_linear_ * sq(s.phi);
  }

  const Field2D& prev = *s.phi_prev;
  const Field2D psi = 2.0 * s.phi - prev;
  const Field2D diff = s.phi - prev;
  const double r2 = 2.0 * r - *s.r_prev;
  const double m2 = s.m ? 2.0 * m - *s.m_prev : 0.0;

  if (printed) {
    if (cfg_.kind == SchemeKind::MsavBdf2Double) {
      if (s.step == 1) return 0.5 * (lphi + r * r - m * m - m2 * m2);
      return 0.5 * (lphi + quad(psi)) + 0.5 * (r * r + r2 * r2 - m * m - m2 * m2);
    }
    const double sl = s_linear_;
    if (s.step == 1) return 0.5 * lphi + r * r + sl * sq(diff) - sl * sq(s.phi);
    return 0.5 * (lphi + inner(apply_symbol(l, psi), diff)) + (r * r + r2 * r2) +
           sl * (2.0 * sq(diff) - sq(s.phi) - sq(psi));
  }

  const double e_bdf = 0.5 * (lphi + quad(psi)) + (r * r + r2 * r2) - (m * m + m2 * m2) +
                       s_linear_ * (2.0 * sq(diff) - sq(s.phi) - sq(psi)) + s_stab_ * sq(diff);
  return 0.5 * e_bdf;
}

EnergyRecord Scheme::record(const SchemeState& s) const {
  EnergyRecord rec;
  rec.step = s.step;
  rec.time = s.time();
  rec.energy_original = energy(model_, s.phi);
  rec.energy_modified = modified_energy(s);
  rec.r = s.r;
  rec.m = s.m;
  return rec;
}

SchemeState init_state(const Scheme& scheme, const Field2D& phi0, double dt) { return scheme.init(phi0, dt); }

double modified_energy(const SchemeState& state, const Scheme& scheme, EnergyConvention conv) {
  return scheme.modified_energy(state, conv);
}

}  // namespace qflow
