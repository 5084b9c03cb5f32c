#pragma once

#include <vector>

#include "cplab/types.hpp"

namespace cplab {

/// Eigendecomposition of a diagonalizable complex matrix.
/// Eigenvalues are sorted lexicographically by (Re, Im); V's columns follow.
struct EigDecomp {
  CMat V;
  CVec lambda;
  double cond_estimate = 0.0;  // condition estimate of V
};

constexpr double kSepMinDefault = 1e-8;
constexpr double kEigTolDefault = 1e-10;

/// [a, b] = ab - ba.
CMat commutator(const CMat& a, const CMat& b);

/// [a, b]_+ = ab + ba.
CMat anticommutator(const CMat& a, const CMat& b);

/// Diagonalizes m. Throws EigenvalueCollision if the smallest pairwise
/// eigenvalue separation is below sep_min (a Jordan block looks like a
/// collision at working precision), NonConvergence if the QR iteration fails,
/// and NonConvergence if the reassembly residual exceeds tol * ||m||_F.
EigDecomp eig_diagonalize(const CMat& m, double sep_min = kSepMinDefault,
                          double tol = kEigTolDefault);

/// Solves Y + [k, Y] = r. Diagonalizes k and divides entrywise by
/// 1 + kappa_i - kappa_j in k's eigenbasis; falls back to a dense n^2 x n^2
/// solve when k is near-defective. Throws SingularOperator when some factor
/// 1 + kappa_i - kappa_j vanishes (the operator Id + ad_k is not invertible)
/// or when the substitution residual exceeds 1e-12 * ||r||_F.
CMat sylvester_ad_solve(const CMat& k, const CMat& r);

double min_pairwise_separation(const CVec& values);

}  // namespace cplab
