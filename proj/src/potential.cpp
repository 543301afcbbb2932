#include "qflow/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qflow/errors.hpp"
#include "qflow/spectral.hpp"

namespace qflow {

PolynomialPotential::PolynomialPotential(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw ConfigError("polynomial coefficients must be finite");
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (degree() > kMaxDegree) {
    std::ostringstream os;
    os << "polynomial degree " << degree() << " exceeds the supported maximum " << kMaxDegree;
    throw ConfigError(os.str());
  }
}

double PolynomialPotential::value(double phi) const {
  double acc = 0.0;
  for (auto c = coeffs_.rbegin(); c != coeffs_.rend(); ++c) acc = acc * phi + *c;
  return acc;
}

double PolynomialPotential::derivative(double phi) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * phi + static_cast<double>(k) * coeffs_[k];
  return acc;
}

double PolynomialPotential::magnitude(double phi) const {
  const double a = std::abs(phi);
  double acc = 0.0;
  for (auto c = coeffs_.rbegin(); c != coeffs_.rend(); ++c) acc = acc * a + std::abs(*c);
  return acc;
}

PolynomialPotential PolynomialPotential::derivative_poly() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return PolynomialPotential(std::move(d));
}

PolynomialPotential operator+(const PolynomialPotential& a, const PolynomialPotential& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
  return PolynomialPotential(std::move(c));
}

PolynomialPotential operator-(const PolynomialPotential& a, const PolynomialPotential& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) - b.coeff(k);
  return PolynomialPotential(std::move(c));
}

std::string PolynomialPotential::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t k = 0; k < coeffs_.size(); ++k) os << (k ? ", " : "") << coeffs_[k];
  os << ']';
  return os.str();
}

Field2D eval_poly(const PolynomialPotential& p, const Field2D& phi, int derivative_order) {
  if (derivative_order != 0 && derivative_order != 1)
    throw ConfigError("eval_poly: derivative_order must be 0 or 1");
  Field2D out(phi.grid());
  if (derivative_order == 0)
    for (std::size_t k = 0; k < phi.size(); ++k) out[k] = p.value(phi[k]);
  else
    for (std::size_t k = 0; k < phi.size(); ++k) out[k] = p.derivative(phi[k]);
  return out;
}

std::vector<double> real_roots(const PolynomialPotential& p) {
  const int n = p.degree();
  if (n < 1) return {};
  auto c = p.coeffs();
  const double lead = c[n];
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  const auto ev = es.eigenvalues();

  const PolynomialPotential dp = p.derivative_poly();
  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const double re = ev[i].real();
    const double im = ev[i].imag();
    if (std::abs(im) > 1e-3 * (1.0 + std::abs(re))) continue;
    double x = re;
    for (int it = 0; it < 50; ++it) {
      const double d = dp.value(x);
      if (d == 0.0) break;
      const double step = p.value(x) / d;
      const double nx = x - step;
      if (!std::isfinite(nx)) break;
      // Keep Newton from wandering off to a different root.
      if (std::abs(nx - re) > 1e-2 * (1.0 + std::abs(re))) break;
      x = nx;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

GlobalMinimum global_minimum(const PolynomialPotential& p) {
  const int n = p.degree();
  if (n <= 0) return {0.0, p.value(0.0), true};
  if (n % 2 == 1 || p.coeffs()[n] < 0.0)
    return {0.0, -std::numeric_limits<double>::infinity(), false};
  GlobalMinimum best{0.0, p.value(0.0), true};
  for (double x : real_roots(p.derivative_poly())) {
    const double v = p.value(x);
    if (v < best.value) best = {x, v, true};
  }
  return best;
}

namespace {

bool below_zero(const PolynomialPotential& p, const GlobalMinimum& m) {
  return !m.bounded || m.value < -1e-12 * (1.0 + p.magnitude(m.phi));
}

void require_kappa(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    std::ostringstream os;
    os << "kappa must be a finite non-negative number, got " << kappa;
    throw ConfigError(os.str());
  }
}

std::string describe_minimum(const GlobalMinimum& m) {
  std::ostringstream os;
  os.precision(17);
  if (!m.bounded)
    os << "unbounded below";
  else
    os << "minimum " << m.value << " at phi = " << m.phi;
  return os.str();
}

}  // namespace

SplitPotential::SplitPotential(PolynomialPotential f, PolynomialPotential m, double kappa, Origin origin)
    : original_(std::move(f)), m_(std::move(m)), ftilde_(original_ + m_), kappa_(kappa), origin_(origin) {
  ftilde_min_ = global_minimum(ftilde_);
  m_nonnegative_ = !below_zero(m_, global_minimum(m_));
}

SplitPotential build_positive_split(const PolynomialPotential& f, double kappa) {
  require_kappa(kappa);
  const int n = f.degree();
  std::vector<double> m(static_cast<std::size_t>(std::max(n + 2, 1)), 0.0);
  if (f.coeff(0) < 0.0) m[0] += -f.coeff(0);
  for (int k = 1; k <= n; ++k) {
    const double a = f.coeff(static_cast<std::size_t>(k));
    if (a == 0.0) continue;
    if (k % 2 == 0) {
      if (a < 0.0) m[static_cast<std::size_t>(k)] += -a;
    } else {
      // |a|/2 phi^(k-1) (phi^2 + 1)
      const double h = 0.5 * std::abs(a);
      m[static_cast<std::size_t>(k + 1)] += h;
      m[static_cast<std::size_t>(k - 1)] += h;
    }
  }
  SplitPotential sp(f, PolynomialPotential(std::move(m)), kappa, SplitPotential::Origin::Constructive);
  if (below_zero(sp.ftilde(), sp.ftilde_minimum()) || !sp.m_nonnegative()) {
    throw NumericalError("internal error: constructive split of " + f.to_string() +
                         " is not non-negative, Ftilde " + describe_minimum(sp.ftilde_minimum()));
  }
  return sp;
}

SplitPotential quadratic_split(const PolynomialPotential& f, double s, double kappa) {
  require_kappa(kappa);
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("S must be a finite non-negative number");
  SplitPotential sp(f, PolynomialPotential({0.0, 0.0, s}), kappa, SplitPotential::Origin::Quadratic);
  if (below_zero(sp.ftilde(), sp.ftilde_minimum())) {
    std::ostringstream os;
    os.precision(17);
    os << "S = " << s << " is too small: F + S phi^2 has " << describe_minimum(sp.ftilde_minimum())
       << "; raise S";
    throw ConfigError(os.str());
  }
  return sp;
}

SplitPotential custom_split(const PolynomialPotential& f, const PolynomialPotential& m, double kappa) {
  require_kappa(kappa);
  SplitPotential sp(f, m, kappa, SplitPotential::Origin::Custom);
  if (below_zero(sp.ftilde(), sp.ftilde_minimum()))
    throw ConfigError("F + M must be non-negative, but it has " + describe_minimum(sp.ftilde_minimum()));
  return sp;
}

double guarded_sqrt(double value, double scale, const char* what, const char* constant_name) {
  if (value >= 0.0) return std::sqrt(value);
  if (value >= -1e-12 * scale) return 0.0;
  std::ostringstream os;
  os.precision(17);
  os << what << " radicand is negative (" << value << "); raise " << constant_name;
  throw RadicandError(os.str());
}

namespace {

[[noreturn]] void non_finite(std::size_t k, const Field2D& phi, const char* what) {
  const std::size_t ny = phi.grid().ny();
  std::ostringstream os;
  os.precision(17);
  os << what << ": non-finite value at sample (" << k / ny << ", " << k % ny << "), phi = " << phi[k];
  throw NumericalError(os.str());
}

}  // namespace

Field2D sqrt_ratio(const PolynomialPotential& p, double shift, const Field2D& phi, const char* constant_name) {
  Field2D out(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double x = phi[k];
    const double pv = p.value(x);
    const double dp = p.derivative(x);
    const double rad = pv + shift;
    const double root = guarded_sqrt(rad, 1.0 + p.magnitude(x) + std::abs(shift), "quadratization", constant_name);
    if (std::abs(rad) < 1e-14 && std::abs(dp) < 1e-14) {
      out[k] = 0.0;
      continue;
    }
    const double r = dp / (2.0 * root);
    if (!std::isfinite(r)) non_finite(k, phi, "quadratization ratio");
    out[k] = r;
  }
  return out;
}

Field2D sqrt_field(const PolynomialPotential& p, double shift, const Field2D& phi, const char* constant_name) {
  Field2D out(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double x = phi[k];
    out[k] = guarded_sqrt(p.value(x) + shift, 1.0 + p.magnitude(x) + std::abs(shift), "auxiliary field",
                          constant_name);
  }
  return out;
}

Field2D quadratization_ratio(const SplitPotential& sp, const Field2D& phi, SplitPart which) {
  const PolynomialPotential& p = which == SplitPart::Ftilde ? sp.ftilde() : sp.m();
  return sqrt_ratio(p, sp.kappa(), phi, "kappa");
}

SplitIntegrals integral_split(const SplitPotential& sp, const Field2D& phi) {
  SplitIntegrals out;
  out.e1 = integrate(eval_poly(sp.original(), phi, 0));
  out.e0 = integrate(eval_poly(sp.m(), phi, 0));
  out.etilde = out.e1 + out.e0;
  return out;
}

}  // namespace qflow
