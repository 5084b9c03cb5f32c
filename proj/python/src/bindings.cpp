#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cplab/canonical.hpp"
#include "cplab/monodromy.hpp"
#include "cplab/suites.hpp"

namespace py = pybind11;
using namespace cplab;

namespace {

void register_errors(py::module_& m) {
  static py::exception<Error> base(m, "CplabError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });
}

}  // namespace

PYBIND11_MODULE(_cplab, m) {
  m.doc() = "Matrix Painleve systems, KKS reduction and Stokes algebra";
  register_errors(m);

  py::enum_<SystemId>(m, "SystemId")
      .value("PVI", SystemId::PVI)
      .value("PV", SystemId::PV)
      .value("PIV", SystemId::PIV)
      .value("PIII_D6", SystemId::PIII_D6)
      .value("PIII_D7", SystemId::PIII_D7)
      .value("PIII_D8", SystemId::PIII_D8)
      .value("PII", SystemId::PII)
      .value("PI", SystemId::PI);
  m.def("system_from_string", &system_from_string);
  m.def("system_name", [](SystemId s) { return to_string(s); });

  py::class_<ParamSet>(m, "ParamSet")
      .def(py::init<>())
      .def_readwrite("theta0", &ParamSet::theta0)
      .def_readwrite("theta1", &ParamSet::theta1)
      .def_readwrite("theta_t", &ParamSet::theta_t)
      .def_readwrite("theta2", &ParamSet::theta2)
      .def_readwrite("k", &ParamSet::k)
      .def_readwrite("theta", &ParamSet::theta)
      .def_static("pvi", &ParamSet::pvi)
      .def_static("pvi_checked", &ParamSet::pvi_checked)
      .def_static("pv", &ParamSet::pv)
      .def_static("piv", &ParamSet::piv)
      .def_static("piii_d6", &ParamSet::piii_d6)
      .def_static("piii_d7", &ParamSet::piii_d7)
      .def_static("piii_d8", &ParamSet::piii_d8)
      .def_static("pii", &ParamSet::pii)
      .def_static("pi", &ParamSet::pi);

  py::class_<MatrixState>(m, "MatrixState")
      .def(py::init([](CMat q, CMat p, Complex t) {
             return MatrixState{std::move(q), std::move(p), t};
           }),
           py::arg("q"), py::arg("p"), py::arg("t"))
      .def_readwrite("q", &MatrixState::q)
      .def_readwrite("p", &MatrixState::p)
      .def_readwrite("t", &MatrixState::t);

  py::class_<LaxValue>(m, "LaxValue")
      .def_readonly("A", &LaxValue::A)
      .def_readonly("B", &LaxValue::B)
      .def_readonly("z", &LaxValue::z);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("sys", &Trajectory::sys)
      .def_readonly("tol", &Trajectory::tol)
      .def_readonly("samples", &Trajectory::samples);

  py::class_<ParticleState>(m, "ParticleState")
      .def(py::init([](CVec x, CVec y, Complex t, Complex g) {
             return ParticleState{std::move(x), std::move(y), t, g};
           }),
           py::arg("x"), py::arg("y"), py::arg("t"), py::arg("g"))
      .def_readwrite("x", &ParticleState::x)
      .def_readwrite("y", &ParticleState::y)
      .def_readwrite("t", &ParticleState::t)
      .def_readwrite("g", &ParticleState::g);

  py::class_<OrbitFrame>(m, "OrbitFrame")
      .def_readonly("C", &OrbitFrame::C)
      .def_readonly("X", &OrbitFrame::X)
      .def_readonly("Y", &OrbitFrame::Y)
      .def_readonly("g", &OrbitFrame::g);

  // matcore
  m.def("commutator", &commutator);
  m.def("anticommutator", &anticommutator);
  m.def("eig_diagonalize",
        [](const CMat& mat, double sep_min, double tol) {
          const EigDecomp ed = eig_diagonalize(mat, sep_min, tol);
          return py::make_tuple(ed.V, ed.lambda, ed.cond_estimate);
        },
        py::arg("m"), py::arg("sep_min") = kSepMinDefault,
        py::arg("tol") = kEigTolDefault);
  m.def("sylvester_ad_solve", &sylvester_ad_solve);

  // syscat
  m.def("lax_pair_eval", &lax_pair_eval);
  m.def("flow_fields", &flow_fields);
  m.def("matrix_hamiltonian", &matrix_hamiltonian);
  m.def("gradient_consistency_residual", &gradient_consistency_residual);
  m.def("zero_curvature_residual", &zero_curvature_residual);
  m.def("default_window", &default_window);

  // flows
  m.def("integrate_matrix_flow",
        [](SystemId sys, const ParamSet& par, const MatrixState& st0, Complex t1,
           double tol, long max_steps, int n_samples) {
          IntegrateOptions opt;
          opt.n_samples = n_samples;
          return integrate_matrix_flow(sys, par, st0, t1, tol, max_steps, opt);
        },
        py::arg("sys"), py::arg("par"), py::arg("st0"), py::arg("t1"),
        py::arg("tol"), py::arg("max_steps") = 200000, py::arg("n_samples") = 33);
  m.def("commutator_drift", &commutator_drift);
  m.def("hamiltonian_log", &hamiltonian_log);

  // reduction
  m.def("orbit_embed", &orbit_embed);
  m.def("kks_normalize", &kks_normalize, py::arg("q"), py::arg("p"), py::arg("g"),
        py::arg("sep_min") = kSepMinDefault);
  m.def("f_matrix",
        [](SystemId sys, const ParamSet& par, const CVec& x, Complex t, Complex g) {
          const FMatrix f = f_matrix(sys, par, x, t, g);
          return py::make_tuple(f.F, f.K);
        });
  m.def("reduced_hamiltonian", &reduced_hamiltonian);
  m.def("particle_flow_fields", &particle_flow_fields);
  m.def("integrate_particle_flow",
        [](SystemId sys, const ParamSet& par, const ParticleState& ps0, Complex t1,
           double tol, long max_steps, int n_samples) {
          IntegrateOptions opt;
          opt.n_samples = n_samples;
          return integrate_particle_flow(sys, par, ps0, t1, tol, max_steps, opt);
        },
        py::arg("sys"), py::arg("par"), py::arg("ps0"), py::arg("t1"),
        py::arg("tol"), py::arg("max_steps") = 200000, py::arg("n_samples") = 33);
  m.def("spectral_match", &spectral_match);

  // elliptic
  py::class_<EllipticContext>(m, "EllipticContext")
      .def(py::init<Complex, int>(), py::arg("tau"), py::arg("trunc_n") = 60)
      .def_property_readonly("tau", &EllipticContext::tau)
      .def_property_readonly("trunc_n", &EllipticContext::trunc_n)
      .def_property_readonly("omegas", &EllipticContext::omegas)
      .def_property_readonly("e", &EllipticContext::e)
      .def_property_readonly("error_estimate", &EllipticContext::error_estimate);
  m.def("wp_jet", [](const EllipticContext& ctx, Complex u) {
    const WpJet j = wp_jet(ctx, u);
    return py::make_tuple(j.wp, j.wp_prime, j.error_estimate);
  });
  m.def("half_periods", &half_periods);
  m.def("lambda_t", &lambda_t);

  // canonical
  py::class_<PhysicalPoint>(m, "PhysicalPoint")
      .def_readonly("q", &PhysicalPoint::q)
      .def_readonly("p", &PhysicalPoint::p)
      .def_readonly("T", &PhysicalPoint::T);
  auto with_tau = [](std::optional<Complex> tau) {
    CanonicalOptions opt;
    opt.tau = tau;
    return opt;
  };
  m.def("map_to_physical",
        [with_tau](SystemId sys, const ParamSet& par, const ParticleState& ps,
                   std::optional<Complex> tau) {
          return map_to_physical(sys, par, ps, with_tau(tau));
        },
        py::arg("sys"), py::arg("par"), py::arg("ps"),
        py::arg("tau") = std::nullopt);
  m.def("map_from_physical",
        [with_tau](SystemId sys, const ParamSet& par, const PhysicalPoint& ph,
                   Complex g, std::optional<Complex> tau) {
          return map_from_physical(sys, par, ph, g, with_tau(tau));
        },
        py::arg("sys"), py::arg("par"), py::arg("ph"), py::arg("g"),
        py::arg("tau") = std::nullopt);
  m.def("symplectic_residual",
        [with_tau](SystemId sys, const ParamSet& par, const ParticleState& ps,
                   double h, std::optional<Complex> tau) {
          return symplectic_residual(sys, par, ps, h, with_tau(tau));
        },
        py::arg("sys"), py::arg("par"), py::arg("ps"), py::arg("h") = 1e-6,
        py::arg("tau") = std::nullopt);
  m.def("pushforward_dynamics_residual",
        [with_tau](SystemId sys, const ParamSet& par,
                   const std::vector<ParticleState>& traj,
                   std::optional<Complex> tau) {
          return pushforward_dynamics_residual(sys, par, traj, with_tau(tau));
        },
        py::arg("sys"), py::arg("par"), py::arg("traj"),
        py::arg("tau") = std::nullopt);
  m.def("pvi_constants", &pvi_constants);
  m.def("pvi_tau_from_t", &pvi_tau_from_t, py::arg("t"),
        py::arg("seed") = std::nullopt, py::arg("elliptic_n") = 40);

  // monodromy
  py::class_<StokesData>(m, "StokesData")
      .def(py::init([](CMat A, CMat B, CMat C, CMat Q, Complex theta) {
             return StokesData{std::move(A), std::move(B), std::move(C),
                               std::move(Q), theta};
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("Q"),
           py::arg("theta"))
      .def_readwrite("A", &StokesData::A)
      .def_readwrite("B", &StokesData::B)
      .def_readwrite("C", &StokesData::C)
      .def_readwrite("Q", &StokesData::Q)
      .def_readwrite("theta", &StokesData::theta);
  py::enum_<Parity>(m, "Parity")
      .value("Qplus", Parity::Qplus)
      .value("Qminus", Parity::Qminus)
      .value("Mixed", Parity::Mixed);
  m.def("formal_jet", [](const CMat& q, const CMat& p, Complex t, Complex theta) {
    const FormalJet j = formal_jet(q, p, t, theta);
    return py::make_tuple(j.Y12, j.Y13);
  });
  m.def("stokes_residuals", &stokes_residuals);
  m.def("monodromy_product", &monodromy_product);
  m.def("monodromy_sqrt", &monodromy_sqrt);
  m.def("scalar_cubic_residual", &scalar_cubic_residual);
  m.def("coupling_parity", &coupling_parity);
  m.def("kks_formal_monodromy", &kks_formal_monodromy);
  m.def("stokes_search",
        [](const CMat& Q, Complex theta, uint64_t seed, int restarts, int max_iter,
           double target) {
          const StokesSearchResult r =
              stokes_search(Q, theta, seed, restarts, max_iter, target);
          return py::make_tuple(r.converged, r.residual, r.point, r.restarts_used);
        },
        py::arg("Q"), py::arg("theta"), py::arg("seed"), py::arg("restarts") = 50,
        py::arg("max_iter") = 120, py::arg("target") = 1e-10);
}
