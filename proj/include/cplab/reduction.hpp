#pragma once

#include <vector>

#include "cplab/flows.hpp"
#include "cplab/matcore.hpp"
#include "cplab/syscat.hpp"

namespace cplab {

/// Diagonalizing frame on the orbit [Y, X] = ig(1 - v^T v), v = (1,...,1).
struct OrbitFrame {
  CMat C;  // det C = 1 up to tolerance
  CMat X;  // diagonal, entries sorted lexicographically by (Re, Im)
  CMat Y;  // diagonal = y_j, off-diagonal ig/(x_j - x_k)
  Complex g{};
};

/// (x, y, t, g) point of the reduced interacting-particle flow.
struct ParticleState {
  CVec x;
  CVec y;
  Complex t{};
  Complex g{};

  Eigen::Index n() const { return x.size(); }
};

/// F = C^{-1} Cdot with diagonal fixed by the row law
/// F_jj = -sum_{k!=j} F_jk + K, K = (1/n) sum_{l!=m} F_lm.
struct FMatrix {
  CMat F;
  Complex K{};
};

void validate_particles(SystemId sys, const ParticleState& ps,
                        double sep_min = kSepMinDefault);

/// X = diag(x); Y with diagonal y and off-diagonal ig/(x_j - x_k).
std::pair<CMat, CMat> orbit_embed(const ParticleState& ps);

/// Recovers the frame of the diagonalization lemma from any (q, p) on the
/// orbit, including gauge-conjugated points: diagonalize q, factor the
/// rank-one part of 1 - [p,q]/(ig), and rescale columns so the commutator
/// becomes exactly ig(1 - v^T v).
OrbitFrame kks_normalize(const CMat& q, const CMat& p, Complex g,
                         double sep_min = kSepMinDefault);

/// Off-diagonal entries from the per-family closed forms (rational in x and
/// t), diagonal from the row law.
FMatrix f_matrix(SystemId sys, const ParamSet& par, const CVec& x, Complex t,
                 Complex g);

/// Scalar multi-particle Hamiltonian (prefactors divided out, as in
/// matrix_hamiltonian).
Complex reduced_hamiltonian(SystemId sys, const ParamSet& par,
                            const ParticleState& ps);

/// Analytic xdot_i = dH/dy_i, ydot_i = -dH/dx_i.
std::pair<CVec, CVec> particle_flow_fields(SystemId sys, const ParamSet& par,
                                           const ParticleState& ps);

std::vector<ParticleState> integrate_particle_flow(SystemId sys,
                                                   const ParamSet& par,
                                                   const ParticleState& ps0,
                                                   Complex t1, double tol,
                                                   long max_steps = 200000,
                                                   const IntegrateOptions& opt = {});

/// Max over the shared grid of the matched distance between eig(q(t)) and
/// x(t), eigenvalues tracked by continuity from the previous grid point.
double spectral_match(const Trajectory& tr, const std::vector<ParticleState>& pr);

}  // namespace cplab
