#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "cplab/types.hpp"

namespace cplab {

enum class SystemId { PVI, PV, PIV, PIII_D6, PIII_D7, PIII_D8, PII, PI };

constexpr std::array<SystemId, 8> kAllSystems = {
    SystemId::PVI,     SystemId::PV,      SystemId::PIV, SystemId::PIII_D6,
    SystemId::PIII_D7, SystemId::PIII_D8, SystemId::PII, SystemId::PI};

std::string to_string(SystemId sys);
SystemId system_from_string(const std::string& name);

/// Named constants of one family. Unused slots stay zero. For PVI,
/// theta = theta0 + theta_t + theta1 is enforced at construction.
struct ParamSet {
  Complex theta0{}, theta1{}, theta_t{}, theta2{}, k{}, theta{};

  static ParamSet pvi(Complex theta0, Complex theta1, Complex theta_t, Complex k);
  static ParamSet pvi_checked(Complex theta0, Complex theta1, Complex theta_t,
                              Complex k, Complex theta);
  static ParamSet pv(Complex theta0, Complex theta1, Complex theta2);
  static ParamSet piv(Complex theta0, Complex theta1);
  static ParamSet piii_d6(Complex theta0, Complex theta1);
  static ParamSet piii_d7(Complex theta);
  static ParamSet piii_d8();
  static ParamSet pii(Complex theta);
  static ParamSet pi();
};

/// A point (q, p, t) of the matrix Hamiltonian flow.
struct MatrixState {
  CMat q;
  CMat p;
  Complex t{};

  Eigen::Index n() const { return q.rows(); }
};

/// Lax matrices at a spectral point; 2x2 blocks of size n.
struct LaxValue {
  CMat A;  // 2n x 2n
  CMat B;
  Complex z{};
};

/// Floor below which q's smallest singular value is rejected for PIII_D8.
constexpr double kInvertibilityFloor = 1e-8;
/// Distance to a fixed singular time below which a state is invalid.
constexpr double kTimeFloor = 1e-12;

/// Fixed singular t values of the flow fields (0 for PV/PIII, {0,1} for PVI).
std::vector<Complex> forbidden_times(SystemId sys);

/// t-window used by default for flow-based checks, away from fixed
/// singular times.
std::pair<Complex, Complex> default_window(SystemId sys);

/// Throws InvalidState when st violates the family's state invariants.
void validate_state(SystemId sys, const MatrixState& st);

/// Poles of A(z)/B(z) in the spectral plane for the given state.
std::vector<Complex> spectral_poles(SystemId sys, const MatrixState& st);

/// Assembles A(z), B(z) from the catalog. Throws SingularSpectralPoint when z
/// collides with a pole, InvalidState per state invariants.
LaxValue lax_pair_eval(SystemId sys, const ParamSet& par, const MatrixState& st,
                       Complex z);

/// Right-hand sides (qdot, pdot) of the matrix Hamilton equations.
std::pair<CMat, CMat> flow_fields(SystemId sys, const ParamSet& par,
                                  const MatrixState& st);

/// Scalar Tr H; the catalog's tH / t(t-1)H prefactors are divided out.
Complex matrix_hamiltonian(SystemId sys, const ParamSet& par,
                           const MatrixState& st);

/// max(|Acal - grad_p TrH|, |Bcal + grad_q TrH|) / max(1, |Acal|, |Bcal|)
/// with central finite differences of step h. Real and imaginary entry
/// perturbations are taken independently; their Cauchy-Riemann mismatch is
/// folded into the returned residual, so a non-holomorphic transcription
/// shows up here.
double gradient_consistency_residual(SystemId sys, const ParamSet& par,
                                     const MatrixState& st, double h);

/// |dA/dt - dB/dz + [A,B]| / max(1, |A|) with dB/dz a central z-difference
/// and dA/dt a central difference along the flow (one tight integrator step
/// of +-dt).
double zero_curvature_residual(SystemId sys, const ParamSet& par,
                               const MatrixState& st, Complex z, double dt,
                               double dz);

}  // namespace cplab
