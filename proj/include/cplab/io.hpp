#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cplab/monodromy.hpp"
#include "cplab/reduction.hpp"

namespace cplab {

using nlohmann::json;

/// Complex numbers serialize as two-element arrays [re, im].
json complex_to_json(Complex z);
Complex complex_from_json(const json& j);
json cmat_to_json(const CMat& m);           // row-major flat list of [re, im]
CMat cmat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols);

/// 17-significant-digit decimal formatting used for byte-stable reports.
std::string format_double(double v);
json report_number(double v);

json trajectory_to_json(const Trajectory& tr, Complex g);
Trajectory trajectory_from_json(const json& j);

json particles_to_json(SystemId sys, const ParamSet& par,
                       const std::vector<ParticleState>& tr, double tol);
std::vector<ParticleState> particles_from_json(const json& j);

json orbit_frame_to_json(const OrbitFrame& fr);
json params_to_json(SystemId sys, const ParamSet& par);
ParamSet params_from_json(SystemId sys, const json& j);

/// CSV of eigenvalue tracks: t_re, t_im, x1_re, x1_im, ...
std::string eigen_tracks_csv(const Trajectory& tr);
/// CSV of a mapped trajectory: T, then q_j, p_j split into _re/_im.
std::string mapped_tracks_csv(const std::vector<Complex>& T,
                              const std::vector<CVec>& q,
                              const std::vector<CVec>& p);

StokesData stokes_from_json(const json& j);
json stokes_report(const StokesData& sd, const std::array<double, 5>& residuals,
                   Parity parity);

/// Batch-run configuration; parses from a JSON document with exactly the
/// known keys (unknown keys are rejected).
struct RunConfig {
  SystemId system = SystemId::PII;
  Eigen::Index n = 1;
  Complex g{};
  ParamSet params{};
  std::optional<CVec> x0, y0;  // carried in "params" as x0/y0 arrays
  Complex t_start{}, t_end{};
  double tol = 1e-10;
  uint64_t seed = 0;
  std::map<std::string, std::string> outputs;
  std::vector<std::pair<std::string, std::optional<double>>> checks;
};

RunConfig run_config_from_json(const json& j);

}  // namespace cplab
