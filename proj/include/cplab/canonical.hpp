#pragma once

#include <optional>
#include <vector>

#include "cplab/elliptic.hpp"
#include "cplab/reduction.hpp"

namespace cplab {

/// Image of a particle state under the per-family canonical map.
struct PhysicalPoint {
  CVec q;
  CVec p;
  Complex T{};
};

struct CanonicalOptions {
  /// PVI modular parameter. When absent it is recovered from ps.t by
  /// inverting t = (e3 - e1)/(e2 - e1).
  std::optional<Complex> tau;
  /// PVI continuity seeds for inverting wp(q_j) = e1 + (e2 - e1) x_j;
  /// without seeds a coarse grid over the fundamental cell is scanned.
  std::optional<CVec> pvi_q_seed;
  int elliptic_n = 40;
  double fd_tau_step = 1e-6;
};

/// (x_j, y_j, t) -> (q_j, p_j, T), coordinatewise, principal branches.
/// PII and PI are the identity. Throws BranchDomain outside the principal
/// branch interior, RootSearchFailure when the PVI inversions fail.
PhysicalPoint map_to_physical(SystemId sys, const ParamSet& par,
                              const ParticleState& ps,
                              const CanonicalOptions& opt = {});

/// Closed-form inverse direction (q_j, p_j, T) -> (x_j, y_j, t).
ParticleState map_from_physical(SystemId sys, const ParamSet& par,
                                const PhysicalPoint& ph, Complex g,
                                const CanonicalOptions& opt = {});

/// max_j |det J_j - 1| of the per-particle 2x2 Jacobian of
/// (x_j, y_j) -> (q_j, p_j) at fixed time, central differences of step h.
double symplectic_residual(SystemId sys, const ParamSet& par,
                           const ParticleState& ps, double h,
                           const CanonicalOptions& opt = {});

/// Maps a reduced trajectory to physical coordinates, finite-differences
/// d(q,p)/dT along it (3-point nonuniform stencil) and returns the worst
/// normalized defect against Hamilton's equations of the physical
/// Hamiltonian in its catalog normalization.
double pushforward_dynamics_residual(SystemId sys, const ParamSet& par,
                                     const std::vector<ParticleState>& traj,
                                     const CanonicalOptions& opt = {});

/// PVI parameter block (g0, g1, g2, g3) of the elliptic Hamiltonian.
std::array<Complex, 4> pvi_constants(const ParamSet& par, Eigen::Index n,
                                     Complex g);

/// Inverts t = (e3 - e1)/(e2 - e1) for tau (Newton over a seed grid).
Complex pvi_tau_from_t(Complex t, std::optional<Complex> seed = {},
                       int elliptic_n = 40);

/// Fornberg weights for the first derivative at `at` over arbitrary complex
/// nodes; exact for polynomials of degree < nodes.size().
std::vector<Complex> first_derivative_weights(const std::vector<Complex>& nodes,
                                              Complex at);

}  // namespace cplab
