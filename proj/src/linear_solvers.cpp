#include "qflow/linear_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

Field2D solve_rank_corrected(double alpha, const SymbolField& g_sym, const SymbolField& l_sym,
                             std::span<const RankTerm> terms, const Field2D& rhs) {
  if (terms.size() > 2) throw SolverError("solve_rank_corrected supports at most two correction terms");
  const SymbolField gl = multiply_symbols(g_sym, l_sym);
  Field2D x = solve_shifted(alpha, gl, rhs);
  if (terms.empty()) return x;

  const std::size_t k = terms.size();
  std::vector<Field2D> p;
  p.reserve(k);
  for (const auto& t : terms) p.push_back(solve_shifted(alpha, gl, apply_symbol(g_sym, t.b)));

  // (I + K) z = <b, x0>, K_ij = c_j <b_i, p_j>
  double a[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  double y[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) {
    y[i] = inner(terms[i].b, x);
    for (std::size_t j = 0; j < k; ++j) a[i][j] += terms[j].c * inner(terms[i].b, p[j]);
  }
  double z[2] = {0.0, 0.0};
  if (k == 1) {
    if (std::abs(a[0][0]) < 1e-14) {
      std::ostringstream os;
      os << "rank-one correction is singular: 1 + c <b, A0^-1 G b> = " << a[0][0];
      throw SolverError(os.str());
    }
    z[0] = y[0] / a[0][0];
  } else {
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const double scale = std::abs(a[0][0] * a[1][1]) + std::abs(a[0][1] * a[1][0]);
    if (std::abs(det) < 1e-14 * scale || scale == 0.0) {
      std::ostringstream os;
      os << "rank-two correction block is singular: det = " << det << " (scale " << scale << ")";
      throw SolverError(os.str());
    }
    z[0] = (a[1][1] * y[0] - a[0][1] * y[1]) / det;
    z[1] = (a[0][0] * y[1] - a[1][0] * y[0]) / det;
  }
  for (std::size_t j = 0; j < k; ++j) x.axpy(-terms[j].c * z[j], p[j]);
  return x;
}

VariableCoeffOperator::VariableCoeffOperator(double alpha_, SymbolField g_sym_, SymbolField l_sym_, Field2D b_,
                                             std::optional<Field2D> d_)
    : alpha(alpha_), g_sym(std::move(g_sym_)), l_sym(std::move(l_sym_)), b(std::move(b_)), d(std::move(d_)),
      weight_(b.grid()) {
  require_same_grid(g_sym.grid(), b.grid(), "VariableCoeffOperator");
  require_same_grid(l_sym.grid(), b.grid(), "VariableCoeffOperator");
  if (d) require_same_grid(d->grid(), b.grid(), "VariableCoeffOperator");
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double dk = d ? (*d)[k] : 0.0;
    weight_[k] = 0.5 * (b[k] * b[k] - dk * dk);
  }
}

Field2D VariableCoeffOperator::apply(const Field2D& x) const {
  Field2D inner_term = apply_symbol(l_sym, x);
  for (std::size_t k = 0; k < x.size(); ++k) inner_term[k] += weight_[k] * x[k];
  Field2D out = apply_symbol(g_sym, inner_term);
  out *= -1.0;
  out.axpy(alpha, x);
  return out;
}

namespace {

double dot(const Field2D& a, const Field2D& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

Field2D solve_variable_coeff(const VariableCoeffOperator& op, const Field2D& rhs, const KrylovOptions& opts,
                             KrylovStats* stats) {
  require_same_grid(op.b.grid(), rhs.grid(), "solve_variable_coeff");
  if (!(opts.tol > 0.0)) throw ConfigError("Krylov tolerance must be positive");
  const Grid& grid = rhs.grid();

  const double wbar = std::max(0.0, op.weight().mean());
  const SymbolField precond_sym = multiply_symbols(op.g_sym, shift_symbol(op.l_sym, wbar));
  auto precond = [&](const Field2D& v) { return solve_shifted(op.alpha, precond_sym, v); };

  // GMRES on P^-1 A x = P^-1 rhs. The preconditioned residual is free of the
  // round-off floor that the large high-wavenumber symbols put on the raw one.
  const Field2D prhs = precond(rhs);
  const double rhs_norm = std::sqrt(dot(prhs, prhs));
  if (stats) *stats = {};
  if (rhs_norm == 0.0) return Field2D(grid);

  Field2D x = prhs;
  const int m = std::max(1, opts.restart);
  int total = 0;
  double rel = 0.0;

  while (true) {
    Field2D r = prhs - precond(op.apply(x));
    const double beta = std::sqrt(dot(r, r));
    rel = beta / rhs_norm;
    if (rel <= opts.tol || total >= opts.max_iterations) break;

    std::vector<Field2D> v;
    v.reserve(static_cast<std::size_t>(m) + 1);
    v.push_back((1.0 / beta) * std::move(r));
    std::vector<std::vector<double>> h(static_cast<std::size_t>(m) + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m, 0.0), sn(m, 0.0), g(static_cast<std::size_t>(m) + 1, 0.0);
    g[0] = beta;

    int j = 0;
    while (j < m && total < opts.max_iterations) {
      Field2D w = precond(op.apply(v[j]));
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        h[i][j] = dot(w, v[i]);
        w.axpy(-h[i][j], v[i]);
      }
      const double hn = std::sqrt(dot(w, w));
      h[j + 1][j] = hn;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      cs[j] = denom == 0.0 ? 1.0 : h[j][j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : h[j + 1][j] / denom;
      h[j][j] = denom;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++j;
      ++total;
      if (std::abs(g[j]) / rhs_norm <= opts.tol || hn == 0.0) break;
      v.push_back((1.0 / hn) * std::move(w));
    }

    // Back substitution on the upper-triangular j x j block.
    std::vector<double> yk(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j; ++l) s -= h[i][l] * yk[l];
      yk[i] = h[i][i] == 0.0 ? 0.0 : s / h[i][i];
    }
    for (int i = 0; i < j; ++i) x.axpy(yk[i], v[i]);
  }

  // The zero mode decouples exactly when G annihilates constants.
  if (op.g_sym(0, 0) == 0.0) {
    const double shift = rhs.mean() / op.alpha - x.mean();
    for (auto& val : x.values()) val += shift;
  }

  if (stats) *stats = {total, rel};
  if (rel > opts.tol) {
    std::ostringstream os;
    os << "Krylov solver did not converge: relative residual " << rel << " after " << total << " iterations";
    throw SolverError(os.str());
  }
  return x;
}

}  // namespace qflow
