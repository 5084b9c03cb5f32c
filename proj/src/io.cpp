#include "cplab/io.hpp"

#include <cinttypes>
#include <cstdio>

namespace cplab {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("complex values must be [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json cmat_to_json(const CMat& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.push_back(complex_to_json(m(i, j)));
  return out;
}

CMat cmat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw ConfigError("matrix entry count mismatch");
  CMat m(rows, cols);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = complex_from_json(j[static_cast<size_t>(at++)]);
  require_finite(m, "matrix from JSON");
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json report_number(double v) {
  // serialized via the fixed 17-digit form so reports are byte-stable
  return json::parse(format_double(v));
}

json params_to_json(SystemId sys, const ParamSet& par) {
  json j = json::object();
  switch (sys) {
    case SystemId::PVI:
      j["theta0"] = complex_to_json(par.theta0);
      j["theta1"] = complex_to_json(par.theta1);
      j["theta_t"] = complex_to_json(par.theta_t);
      j["k"] = complex_to_json(par.k);
      j["theta"] = complex_to_json(par.theta);
      break;
    case SystemId::PV:
      j["theta0"] = complex_to_json(par.theta0);
      j["theta1"] = complex_to_json(par.theta1);
      j["theta2"] = complex_to_json(par.theta2);
      break;
    case SystemId::PIV:
    case SystemId::PIII_D6:
      j["theta0"] = complex_to_json(par.theta0);
      j["theta1"] = complex_to_json(par.theta1);
      break;
    case SystemId::PIII_D7:
    case SystemId::PII:
      j["theta"] = complex_to_json(par.theta);
      break;
    default:
      break;
  }
  return j;
}

ParamSet params_from_json(SystemId sys, const json& j) {
  if (!j.is_object()) throw ConfigError("params must be an object");
  auto get = [&](const char* key) -> Complex {
    auto it = j.find(key);
    if (it == j.end()) return Complex(0);
    return complex_from_json(*it);
  };
  switch (sys) {
    case SystemId::PVI: {
      if (j.contains("theta"))
        return ParamSet::pvi_checked(get("theta0"), get("theta1"), get("theta_t"),
                                     get("k"), get("theta"));
      return ParamSet::pvi(get("theta0"), get("theta1"), get("theta_t"), get("k"));
    }
    case SystemId::PV: return ParamSet::pv(get("theta0"), get("theta1"), get("theta2"));
    case SystemId::PIV: return ParamSet::piv(get("theta0"), get("theta1"));
    case SystemId::PIII_D6: return ParamSet::piii_d6(get("theta0"), get("theta1"));
    case SystemId::PIII_D7: return ParamSet::piii_d7(get("theta"));
    case SystemId::PIII_D8: return ParamSet::piii_d8();
    case SystemId::PII: return ParamSet::pii(get("theta"));
    case SystemId::PI: return ParamSet::pi();
  }
  throw ConfigError("unreachable system");
}

json trajectory_to_json(const Trajectory& tr, Complex g) {
  json j;
  j["system"] = to_string(tr.sys);
  j["params"] = params_to_json(tr.sys, tr.par);
  j["n"] = tr.samples.empty() ? 0 : tr.samples.front().n();
  j["g"] = complex_to_json(g);
  j["tol"] = tr.tol;
  json samples = json::array();
  for (const MatrixState& st : tr.samples) {
    json s;
    s["t_re"] = st.t.real();
    s["t_im"] = st.t.imag();
    s["q"] = cmat_to_json(st.q);
    s["p"] = cmat_to_json(st.p);
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory tr;
  tr.sys = system_from_string(j.at("system").get<std::string>());
  tr.par = params_from_json(tr.sys, j.at("params"));
  tr.tol = j.at("tol").get<double>();
  const auto n = j.at("n").get<Eigen::Index>();
  for (const json& s : j.at("samples")) {
    MatrixState st;
    st.t = Complex(s.at("t_re").get<double>(), s.at("t_im").get<double>());
    st.q = cmat_from_json(s.at("q"), n, n);
    st.p = cmat_from_json(s.at("p"), n, n);
    tr.samples.push_back(std::move(st));
  }
  return tr;
}

json particles_to_json(SystemId sys, const ParamSet& par,
                       const std::vector<ParticleState>& tr, double tol) {
  json j;
  j["system"] = to_string(sys);
  j["params"] = params_to_json(sys, par);
  j["n"] = tr.empty() ? 0 : tr.front().n();
  j["g"] = complex_to_json(tr.empty() ? Complex(0) : tr.front().g);
  j["tol"] = tol;
  json samples = json::array();
  for (const ParticleState& ps : tr) {
    json s;
    s["t_re"] = ps.t.real();
    s["t_im"] = ps.t.imag();
    s["x"] = cmat_to_json(ps.x);
    s["y"] = cmat_to_json(ps.y);
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  return j;
}

std::vector<ParticleState> particles_from_json(const json& j) {
  std::vector<ParticleState> out;
  const auto n = j.at("n").get<Eigen::Index>();
  const Complex g = complex_from_json(j.at("g"));
  for (const json& s : j.at("samples")) {
    ParticleState ps;
    ps.t = Complex(s.at("t_re").get<double>(), s.at("t_im").get<double>());
    ps.x = cmat_from_json(s.at("x"), n, 1);
    ps.y = cmat_from_json(s.at("y"), n, 1);
    ps.g = g;
    out.push_back(std::move(ps));
  }
  return out;
}

json orbit_frame_to_json(const OrbitFrame& fr) {
  json j;
  j["C"] = cmat_to_json(fr.C);
  j["X"] = cmat_to_json(fr.X);
  j["Y"] = cmat_to_json(fr.Y);
  j["g"] = complex_to_json(fr.g);
  return j;
}

namespace {

void csv_append(std::string& out, double v, bool last) {
  out += format_double(v);
  out += last ? '\n' : ',';
}

}  // namespace

std::string eigen_tracks_csv(const Trajectory& tr) {
  if (tr.samples.empty()) throw EmptyTrajectory("eigen_tracks_csv");
  const Eigen::Index n = tr.samples.front().n();
  std::string out = "t_re,t_im";
  for (Eigen::Index i = 1; i <= n; ++i) {
    out += ",x" + std::to_string(i) + "_re,x" + std::to_string(i) + "_im";
  }
  out += '\n';

  CVec ref(n);
  bool have_ref = false;
  for (const MatrixState& st : tr.samples) {
    Eigen::ComplexEigenSolver<CMat> es(st.q, false);
    if (es.info() != Eigen::Success) throw NonConvergence("eigen_tracks_csv");
    CVec lam = es.eigenvalues();
    if (!have_ref) {
      std::sort(lam.begin(), lam.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
      });
      have_ref = true;
    } else {
      // continuity: greedy nearest to the previous row
      CVec matched(n);
      std::vector<bool> used(static_cast<size_t>(n), false);
      for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index arg = -1;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (used[static_cast<size_t>(k)]) continue;
          const double d = std::abs(lam[k] - ref[i]);
          if (d < best) { best = d; arg = k; }
        }
        used[static_cast<size_t>(arg)] = true;
        matched[i] = lam[arg];
      }
      lam = matched;
    }
    ref = lam;
    csv_append(out, st.t.real(), false);
    csv_append(out, st.t.imag(), n == 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      csv_append(out, lam[i].real(), false);
      csv_append(out, lam[i].imag(), i == n - 1);
    }
  }
  return out;
}

std::string mapped_tracks_csv(const std::vector<Complex>& T,
                              const std::vector<CVec>& q,
                              const std::vector<CVec>& p) {
  if (T.size() != q.size() || T.size() != p.size())
    throw GridMismatch("mapped_tracks_csv");
  if (T.empty()) throw EmptyTrajectory("mapped_tracks_csv");
  const Eigen::Index n = q.front().size();
  std::string out = "T_re,T_im";
  for (Eigen::Index i = 1; i <= n; ++i)
    out += ",q" + std::to_string(i) + "_re,q" + std::to_string(i) + "_im" +
           ",p" + std::to_string(i) + "_re,p" + std::to_string(i) + "_im";
  out += '\n';
  for (size_t s = 0; s < T.size(); ++s) {
    csv_append(out, T[s].real(), false);
    csv_append(out, T[s].imag(), n == 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      csv_append(out, q[s][i].real(), false);
      csv_append(out, q[s][i].imag(), false);
      csv_append(out, p[s][i].real(), false);
      csv_append(out, p[s][i].imag(), i == n - 1);
    }
  }
  return out;
}

StokesData stokes_from_json(const json& j) {
  StokesData sd;
  const auto n = j.at("n").get<Eigen::Index>();
  sd.A = cmat_from_json(j.at("A"), n, n);
  sd.B = cmat_from_json(j.at("B"), n, n);
  sd.C = cmat_from_json(j.at("C"), n, n);
  sd.Q = cmat_from_json(j.at("Q"), n, n);
  sd.theta = complex_from_json(j.at("theta"));
  return sd;
}

json stokes_report(const StokesData& sd, const std::array<double, 5>& residuals,
                   Parity parity) {
  json j;
  json r = json::array();
  for (double v : residuals) r.push_back(report_number(v));
  j["residuals"] = std::move(r);
  j["parity"] = to_string(parity);
  j["theta"] = complex_to_json(sd.theta);
  j["n"] = sd.A.rows();
  return j;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "system", "n", "g", "params", "t_start", "t_end",
      "tol",    "seed", "outputs", "checks"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  }
  RunConfig cfg;
  cfg.system = system_from_string(j.at("system").get<std::string>());
  cfg.n = j.value("n", 1);
  if (cfg.n < 1 || cfg.n > 16) throw ConfigError("n must be in [1, 16]");
  if (j.contains("g")) cfg.g = complex_from_json(j.at("g"));

  json params = j.value("params", json::object());
  if (!params.is_object()) throw ConfigError("params must be an object");
  if (params.contains("x0")) {
    const json& arr = params.at("x0");
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != cfg.n)
      throw ConfigError("x0 must be an array of n complex values");
    cfg.x0 = cmat_from_json(arr, cfg.n, 1);
    params.erase("x0");
  }
  if (params.contains("y0")) {
    const json& arr = params.at("y0");
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != cfg.n)
      throw ConfigError("y0 must be an array of n complex values");
    cfg.y0 = cmat_from_json(arr, cfg.n, 1);
    params.erase("y0");
  }
  cfg.params = params_from_json(cfg.system, params);

  if (j.contains("t_start")) cfg.t_start = complex_from_json(j.at("t_start"));
  else cfg.t_start = default_window(cfg.system).first;
  if (j.contains("t_end")) cfg.t_end = complex_from_json(j.at("t_end"));
  else cfg.t_end = default_window(cfg.system).second;

  cfg.tol = j.value("tol", 1e-10);
  if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-3))
    throw ConfigError("tol must lie in [1e-13, 1e-3]");
  cfg.seed = j.value("seed", 0);

  if (j.contains("outputs")) {
    const json& out = j.at("outputs");
    if (!out.is_object()) throw ConfigError("outputs must be an object");
    static const std::vector<std::string> kinds = {
        "trajectory", "particles", "eigen_csv", "mapped_csv", "report"};
    for (auto it = out.begin(); it != out.end(); ++it) {
      if (std::find(kinds.begin(), kinds.end(), it.key()) == kinds.end())
        throw ConfigError("unknown output kind '" + it.key() + "'");
      if (!it.value().is_string()) throw ConfigError("output paths must be strings");
      cfg.outputs[it.key()] = it.value().get<std::string>();
    }
  }

  if (j.contains("checks")) {
    const json& checks = j.at("checks");
    if (!checks.is_array()) throw ConfigError("checks must be an array");
    for (const json& c : checks) {
      if (c.is_string()) {
        cfg.checks.emplace_back(c.get<std::string>(), std::nullopt);
      } else if (c.is_object() && c.contains("name")) {
        std::optional<double> thr;
        if (c.contains("threshold")) thr = c.at("threshold").get<double>();
        cfg.checks.emplace_back(c.at("name").get<std::string>(), thr);
      } else {
        throw ConfigError("checks entries must be names or {name, threshold}");
      }
    }
  }
  return cfg;
}

}  // namespace cplab
