#include "qflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

SymbolField::SymbolField(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

double SymbolField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SymbolField::max() const { return *std::max_element(values_.begin(), values_.end()); }

SymbolField laplacian_symbol(const Grid& grid) {
  return SymbolField::from_wavenumbers(grid, [](double kx, double ky) { return -(kx * kx + ky * ky); });
}

SymbolField compose_symbol(const SymbolField& base, std::span<const double> poly) {
  SymbolField out(base.grid());
  auto src = base.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) {
    double acc = 0.0;
    for (auto c = poly.rbegin(); c != poly.rend(); ++c) acc = acc * src[k] + *c;
    dst[k] = acc;
  }
  return out;
}

SymbolField multiply_symbols(const SymbolField& a, const SymbolField& b) {
  require_same_grid(a.grid(), b.grid(), "multiply_symbols");
  SymbolField out(a.grid());
  for (std::size_t k = 0; k < out.values().size(); ++k) out.values()[k] = a.values()[k] * b.values()[k];
  return out;
}

SymbolField shift_symbol(const SymbolField& a, double shift) {
  SymbolField out = a;
  for (auto& v : out.values()) v += shift;
  return out;
}

namespace {

// Multiplies the half spectrum by a function of the full-layout index.
template <typename Fn>
Field2D spectral_map(const Field2D& f, Fn&& per_mode) {
  const Grid& g = f.grid();
  const std::size_t nyh = g.ny() / 2 + 1;
  std::vector<std::complex<double>> spec(g.spectral_size());
  g.forward(f.values(), spec);
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < nyh; ++j) per_mode(i, j, spec[i * nyh + j]);
  Field2D out(g);
  g.inverse(spec, out.values());
  return out;
}

}  // namespace

Field2D apply_symbol(const SymbolField& sym, const Field2D& f) {
  require_same_grid(sym.grid(), f.grid(), "apply_symbol");
  return spectral_map(f, [&](std::size_t i, std::size_t j, std::complex<double>& c) { c *= sym(i, j); });
}

Field2D solve_shifted(double alpha, const SymbolField& sym, const Field2D& rhs) {
  require_same_grid(sym.grid(), rhs.grid(), "solve_shifted");
  const Grid& g = rhs.grid();
  double l1 = 0.0;
  for (double v : rhs.values()) l1 += std::abs(v);
  const double singular_tol = 1e-14 * std::max(1.0, std::abs(alpha));
  const double null_tol = 1e-12 * l1;
  return spectral_map(rhs, [&](std::size_t i, std::size_t j, std::complex<double>& c) {
    const double d = alpha - sym(i, j);
    if (std::abs(d) < singular_tol) {
      if (std::abs(c) <= null_tol) {
        c = 0.0;
        return;
      }
      std::ostringstream os;
      os << "solve_shifted: singular mode (" << i << ", " << j << ") with wavenumber (" << g.kx(i) << ", "
         << g.ky(j) << "): alpha - symbol = " << d << " but the right-hand side has a component there";
      throw SolverError(os.str());
    }
    c /= d;
  });
}

double inner(const Field2D& f, const Field2D& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * g[k];
  return s * f.grid().cell_area();
}

double norm2(const Field2D& f) { return std::sqrt(inner(f, f)); }

double integrate(const Field2D& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_area();
}

}  // namespace qflow
