#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qflow/spectral.hpp"

namespace qflow {

/// One low-rank term c * G[b <b, x>] of a corrected operator.
struct RankTerm {
  Field2D b;
  double c;
};

/// Solves (alpha I - G L) x + sum_i c_i G[b_i <b_i, x>] = rhs, with G and L
/// given by their Fourier symbols and <.,.> the grid inner product.
///
/// Superposition: with A0 = alpha I - G L, x0 = A0^-1 rhs and
/// p_i = A0^-1 G b_i, the unknown projections z_i = <b_i, x> satisfy the
/// k x k system (I + K) z = <b, x0>, K_ij = c_j <b_i, p_j>, after which
/// x = x0 - sum_j c_j z_j p_j. That is k + 1 spectral solves and one dense
/// solve of size k <= 2.
///
/// Throws SolverError when the correction block is singular (|det| below
/// 1e-14 relative to its terms), or from solve_shifted on a singular mode.
Field2D solve_rank_corrected(double alpha, const SymbolField& g_sym, const SymbolField& l_sym,
                             std::span<const RankTerm> terms, const Field2D& rhs);

/// alpha x - G[L x + 1/2 (b^2 - d^2) x]: the operator left after the
/// pointwise auxiliary fields of the IEQ schemes are eliminated.
struct VariableCoeffOperator {
  double alpha;
  SymbolField g_sym;
  SymbolField l_sym;
  Field2D b;
  std::optional<Field2D> d;

  VariableCoeffOperator(double alpha, SymbolField g_sym, SymbolField l_sym, Field2D b,
                        std::optional<Field2D> d = std::nullopt);

  Field2D apply(const Field2D& x) const;
  /// Pointwise coefficient 1/2 (b^2 - d^2).
  const Field2D& weight() const { return weight_; }

 private:
  Field2D weight_;
};

struct KrylovStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct KrylovOptions {
  double tol = 1e-10;
  int restart = 50;
  int max_iterations = 500;
};

/// Left-preconditioned restarted GMRES on VariableCoeffOperator. The
/// preconditioner P is the constant-coefficient inverse with the weight
/// replaced by its (non-negative part of the) mean, applied spectrally.
/// Converged when ||P^-1 (rhs - A x)|| <= tol ||P^-1 rhs||; otherwise
/// SolverError with the final residual and iteration count.
Field2D solve_variable_coeff(const VariableCoeffOperator& op, const Field2D& rhs, const KrylovOptions& opts = {},
                             KrylovStats* stats = nullptr);

}  // namespace qflow
