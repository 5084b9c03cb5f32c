#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cplab/syscat.hpp"

namespace cplab {

/// Samples of one matrix flow at monotone points along a straight complex
/// time segment.
struct Trajectory {
  SystemId sys{};
  ParamSet par{};
  Complex g{};  // coupling of the orbit the initial data sits on, if any
  double tol = 0.0;
  std::vector<MatrixState> samples;
};

struct IntegrateOptions {
  int n_samples = 33;       // output grid size including both endpoints
  long max_steps = 200000;
  double min_path_distance = 1e-3;  // clearance from forbidden t values
};

/// Embedded Dormand-Prince 5(4) over the real parametrization of the segment
/// [0, L], L = |t1 - t0|. Steps are clipped to the output grid, so samples
/// carry no interpolation error. Throws StepFailure on step-size underflow
/// (movable pole) and ForbiddenTimePath when the segment passes a fixed
/// singular time.
Trajectory integrate_matrix_flow(SystemId sys, const ParamSet& par,
                                 const MatrixState& st0, Complex t1, double tol,
                                 long max_steps = 200000,
                                 const IntegrateOptions& opt = {});

/// One accurate flow step st.t -> t1 (internal tolerance `tol`), used by the
/// zero-curvature check; returns only the final state.
MatrixState advance_state(SystemId sys, const ParamSet& par,
                          const MatrixState& st, Complex t1, double tol);

/// max_k |[p,q](t_k) - [p,q](t_0)| / max(1, |[p,q](t_0)|).
double commutator_drift(const Trajectory& tr);

/// (t, H) along the trajectory; no conservation implied.
std::vector<std::pair<Complex, Complex>> hamiltonian_log(const Trajectory& tr);

namespace detail {

/// Generic adaptive DOPRI5(4) driver on complex vectors, s in [0, length].
/// `out_grid` must be sorted, start at 0 and end at length; the result holds
/// the state at each grid point.
std::vector<CVec> rk45(const std::function<CVec(double, const CVec&)>& f,
                       const CVec& y0, double length,
                       const std::vector<double>& out_grid, double tol,
                       long max_steps);

}  // namespace detail

}  // namespace cplab
