#pragma once

#include <span>
#include <vector>

#include "qflow/grid.hpp"

namespace qflow {

/// Real Fourier multipliers, one per wavenumber pair (i, j), stored with the
/// same nx*ny layout as Field2D. Every operator in the library (Laplacian,
/// (1+Laplacian)^2, constants) is even in k, so only the half spectrum is
/// ever read when the symbol is applied.
class SymbolField {
 public:
  explicit SymbolField(Grid grid, double fill = 0.0);

  template <typename Fn>
  static SymbolField from_wavenumbers(const Grid& grid, Fn&& fn) {
    SymbolField out(grid);
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t j = 0; j < grid.ny(); ++j) out(i, j) = fn(grid.kx(i), grid.ky(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.ny() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.ny() + j]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// -(kx^2 + ky^2)
SymbolField laplacian_symbol(const Grid& grid);

/// Pointwise p(s) where p has coefficients c0 + c1 s + c2 s^2 + ...
SymbolField compose_symbol(const SymbolField& base, std::span<const double> poly);
/// Pointwise product a*b.
SymbolField multiply_symbols(const SymbolField& a, const SymbolField& b);
/// a + shift
SymbolField shift_symbol(const SymbolField& a, double shift);

/// inverse_fft(sym * fft(f)).
Field2D apply_symbol(const SymbolField& sym, const Field2D& f);

/// Solves (alpha I - sym) u = rhs mode by mode.
///
/// Throws SolverError naming the wavenumber when |alpha - sym| falls below
/// 1e-14 * max(1, |alpha|) on a mode where rhs is nonzero; modes where both
/// vanish (the null space of a singular operator with compatible data) are
/// set to zero, which selects the zero-mean solution for the Laplacian.
Field2D solve_shifted(double alpha, const SymbolField& sym, const Field2D& rhs);

/// Rectangle-rule L2 inner product hx*hy*sum(f*g).
double inner(const Field2D& f, const Field2D& g);
double norm2(const Field2D& f);
/// Rectangle-rule integral of f.
double integrate(const Field2D& f);

}  // namespace qflow
