#pragma once

#include <span>
#include <string>
#include <vector>

#include "qflow/grid.hpp"

namespace qflow {

/// F(phi) = a0 + a1 phi + ... + an phi^n with n <= 16. Trailing zero
/// coefficients are trimmed on construction, so degree() is exact (the zero
/// polynomial has no coefficients and degree -1).
class PolynomialPotential {
 public:
  static constexpr int kMaxDegree = 16;

  PolynomialPotential() = default;
  explicit PolynomialPotential(std::vector<double> coeffs);

  std::span<const double> coeffs() const { return coeffs_; }
  /// Coefficient of phi^k, zero beyond the degree.
  double coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  double value(double phi) const;
  double derivative(double phi) const;
  /// sum |a_k| |phi|^k, the magnitude against which round-off in value() is judged.
  double magnitude(double phi) const;

  PolynomialPotential derivative_poly() const;
  friend PolynomialPotential operator+(const PolynomialPotential& a, const PolynomialPotential& b);
  friend PolynomialPotential operator-(const PolynomialPotential& a, const PolynomialPotential& b);

  std::string to_string() const;

 private:
  std::vector<double> coeffs_;
};

/// Pointwise F (derivative_order 0) or F' (derivative_order 1).
Field2D eval_poly(const PolynomialPotential& p, const Field2D& phi, int derivative_order);

/// Real roots of p, ascending. Uses companion-matrix eigenvalues refined by
/// Newton iteration; nearly real complex pairs are reported by their real
/// part, so the list may contain extra points near double roots.
std::vector<double> real_roots(const PolynomialPotential& p);

struct GlobalMinimum {
  double phi = 0.0;
  double value = 0.0;
  bool bounded = true;  ///< false when p -> -inf as |phi| -> inf
};

/// Global minimum over the real line, searched over the real critical points.
GlobalMinimum global_minimum(const PolynomialPotential& p);

/// F together with the compensating density M and the regularizer kappa, so
/// that Ftilde = F + M is bounded below by zero.
class SplitPotential {
 public:
  enum class Origin { Constructive, Quadratic, Custom };

  const PolynomialPotential& original() const { return original_; }
  const PolynomialPotential& m() const { return m_; }
  const PolynomialPotential& ftilde() const { return ftilde_; }
  double kappa() const { return kappa_; }
  Origin origin() const { return origin_; }
  /// Global minimum of Ftilde established at construction.
  const GlobalMinimum& ftilde_minimum() const { return ftilde_min_; }
  /// Whether M >= 0 on the whole real line. Custom splits (for instance the
  /// density 2 phi^3 + 4 phi^2) may violate this; schemes then guard the
  /// radicand M + kappa at run time.
  bool m_nonnegative() const { return m_nonnegative_; }

  friend SplitPotential build_positive_split(const PolynomialPotential&, double);
  friend SplitPotential quadratic_split(const PolynomialPotential&, double, double);
  friend SplitPotential custom_split(const PolynomialPotential&, const PolynomialPotential&, double);

 private:
  SplitPotential(PolynomialPotential f, PolynomialPotential m, double kappa, Origin origin);

  PolynomialPotential original_;
  PolynomialPotential m_;
  PolynomialPotential ftilde_;
  double kappa_ = 0.0;
  Origin origin_ = Origin::Custom;
  GlobalMinimum ftilde_min_;
  bool m_nonnegative_ = true;
};

/// Coefficient-wise construction of M from the signs of F's coefficients:
///   even a_2k < 0          -> M += -a_2k phi^2k
///   odd  a_2k-1 != 0       -> M += |a_2k-1|/2 * phi^(2k-2) (phi^2 + 1)
///   constant a_0 < 0       -> M += -a_0
/// which makes every odd monomial a perfect square,
///   a phi^(2k-1) + |a|/2 phi^(2k-2)(phi^2+1) = |a|/2 phi^(2k-2) (phi + sgn a)^2.
/// Ftilde >= 0 is re-verified numerically; a failure throws NumericalError
/// with the minimizing phi.
SplitPotential build_positive_split(const PolynomialPotential& f, double kappa = 1e-8);

/// M = S phi^2. Throws ConfigError when F + S phi^2 dips below zero,
/// reporting the minimizer and the value there.
SplitPotential quadratic_split(const PolynomialPotential& f, double s, double kappa = 1e-8);

/// User supplied M. Ftilde = F + M must be non-negative (ConfigError
/// otherwise); M itself is only checked and recorded.
SplitPotential custom_split(const PolynomialPotential& f, const PolynomialPotential& m, double kappa = 1e-8);

enum class SplitPart { Ftilde, M };

/// P'(phi) / (2 sqrt(P(phi) + kappa)) pointwise, P being Ftilde or M. Where
/// both P + kappa and |P'| vanish below 1e-14 the analytic limit 0 is used.
/// Throws RadicandError if P + kappa is negative beyond round-off and
/// NumericalError on any other non-finite value, with the sample index.
Field2D quadratization_ratio(const SplitPotential& sp, const Field2D& phi, SplitPart which);

/// Same quotient for an arbitrary polynomial and shift, P'/(2 sqrt(P + shift)).
/// `constant_name` names the shift in radicand diagnostics ("C", "kappa").
Field2D sqrt_ratio(const PolynomialPotential& p, double shift, const Field2D& phi, const char* constant_name);

/// sqrt(P + shift) pointwise, with the radicand guard of sqrt_ratio.
Field2D sqrt_field(const PolynomialPotential& p, double shift, const Field2D& phi, const char* constant_name);

/// sqrt(value) for a scalar radicand: values below -1e-12 * scale throw
/// RadicandError naming `constant_name`, values in [-1e-12 * scale, 0) are
/// clamped to zero.
double guarded_sqrt(double value, double scale, const char* what, const char* constant_name);

struct SplitIntegrals {
  double e1 = 0.0;      ///< integral of F
  double e0 = 0.0;      ///< integral of M
  double etilde = 0.0;  ///< e1 + e0
};

SplitIntegrals integral_split(const SplitPotential& sp, const Field2D& phi);

}  // namespace qflow
