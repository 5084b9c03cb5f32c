#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cplab/suites.hpp"
#include "cplab/syscat.hpp"

using namespace cplab;

namespace {

MatrixState scalar_state(Complex q, Complex p, Complex t) {
  MatrixState st;
  st.q = CMat::Constant(1, 1, q);
  st.p = CMat::Constant(1, 1, p);
  st.t = t;
  return st;
}

}  // namespace

TEST_CASE("PVI parameter constraint is enforced") {
  CHECK_NOTHROW(ParamSet::pvi_checked(0.1, 0.2, 0.3, 0.4, 0.6));
  CHECK_THROWS_AS(ParamSet::pvi_checked(0.1, 0.2, 0.3, 0.4, 0.7), InvalidState);
}

TEST_CASE("PII lax value at the origin state") {
  const MatrixState st = scalar_state(0, 0, 0);
  const LaxValue lv = lax_pair_eval(SystemId::PII, ParamSet::pii(0), st, 1.0);
  CMat wantA = CMat::Zero(2, 2);
  wantA(0, 0) = 0.5 * kI;
  wantA(1, 1) = -0.5 * kI;
  CHECK((lv.A - wantA).norm() == doctest::Approx(0));
  CHECK((lv.B - wantA).norm() == doctest::Approx(0));
}

TEST_CASE("PI lax value at the origin state, z = 0") {
  const MatrixState st = scalar_state(0, 0, 0);
  const LaxValue lv = lax_pair_eval(SystemId::PI, ParamSet::pi(), st, 0.0);
  CHECK(lv.A.norm() == doctest::Approx(0));
  CMat wantB = CMat::Zero(2, 2);
  wantB(0, 1) = 0.5;
  CHECK((lv.B - wantB).norm() == doctest::Approx(0));
}

TEST_CASE("PVI z = t is a singular spectral point") {
  suites::Rng rng(3);
  const ParamSet par = suites::random_params(SystemId::PVI, rng);
  const MatrixState st = suites::random_state(SystemId::PVI, 2, rng);
  CHECK_THROWS_AS(lax_pair_eval(SystemId::PVI, par, st, st.t),
                  SingularSpectralPoint);
}

TEST_CASE("PII flow fields") {
  const Complex theta(0.37, -0.11);
  const MatrixState st = scalar_state(Complex(0.4, 0.1), Complex(-0.3, 0.2), 0.7);
  auto [a, b] = flow_fields(SystemId::PII, ParamSet::pii(theta), st);
  CHECK((a - st.p).norm() == doctest::Approx(0));
  const CMat want = 2.0 * st.q * st.q * st.q + st.t * st.q +
                    theta * CMat::Identity(1, 1);
  CHECK((b - want).norm() == doctest::Approx(0));
}

TEST_CASE("PI flow at q=p=0, t=4") {
  const MatrixState st = scalar_state(0, 0, 4.0);
  auto [a, b] = flow_fields(SystemId::PI, ParamSet::pi(), st);
  CHECK(a.norm() == doctest::Approx(0));
  CHECK((b - CMat::Identity(1, 1)).norm() == doctest::Approx(0));
}

TEST_CASE("PIII_D7 scalar flow example") {
  const MatrixState st = scalar_state(1.0, 0.0, 2.0);
  auto [a, b] = flow_fields(SystemId::PIII_D7, ParamSet::piii_d7(0), st);
  CHECK(std::abs(a(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(b(0, 0) + 0.5) < 1e-15);
}

TEST_CASE("matrix hamiltonian scalar examples") {
  CHECK(std::abs(matrix_hamiltonian(SystemId::PII, ParamSet::pii(0),
                                    scalar_state(1, 0, 0)) -
                 Complex(-0.5)) < 1e-15);
  CHECK(std::abs(matrix_hamiltonian(SystemId::PI, ParamSet::pi(),
                                    scalar_state(0, 1, 0.33)) -
                 Complex(0.5)) < 1e-15);
  CHECK(std::abs(matrix_hamiltonian(SystemId::PII, ParamSet::pii(0.9),
                                    scalar_state(0, 0, 0))) < 1e-15);
}

TEST_CASE("gradient consistency across families and sizes") {
  uint64_t seed = 1000;
  for (SystemId sys : kAllSystems)
    for (Eigen::Index n : {1, 2, 3}) {
      const double r = suites::gradient_consistency(sys, n, seed++, 2);
      INFO(to_string(sys), " n=", n, " residual=", r);
      CHECK(r <= 1e-6);
    }
}

TEST_CASE("finite-difference step sanity") {
  suites::Rng rng(9);
  const ParamSet par = suites::random_params(SystemId::PIV, rng);
  const MatrixState st = suites::random_state(SystemId::PIV, 2, rng);
  const double r5 = gradient_consistency_residual(SystemId::PIV, par, st, 1e-5);
  const double r6 = gradient_consistency_residual(SystemId::PIV, par, st, 1e-6);
  CHECK(r5 <= 1e-8);
  CHECK(r6 <= 1e-7);
}

TEST_CASE("zero curvature along integrated flows") {
  uint64_t seed = 2000;
  for (SystemId sys : kAllSystems) {
    const double r = suites::zero_curvature(sys, 2, seed++, 2);
    INFO(to_string(sys), " residual=", r);
    CHECK(r <= 1e-6);
  }
}

TEST_CASE("zero curvature detects an off-flow perturbation") {
  suites::Rng rng(77);
  const ParamSet par = suites::random_params(SystemId::PII, rng);
  const MatrixState st = suites::random_state(SystemId::PII, 1, rng);
  const Complex z = 1.0 + kI;
  const double good =
      zero_curvature_residual(SystemId::PII, par, st, z, 1e-4, 1e-4);
  CHECK(good <= 1e-6);

  // same residual with pdot replaced by pdot + 1: time-step the perturbed
  // flow (one RK2 step is plenty for a 1e-2 bound) and reassemble
  const double dt = 1e-5, dz = 1e-4;
  auto perturbed_step = [&](double dir) {
    auto [a1, b1] = flow_fields(SystemId::PII, par, st);
    MatrixState mid = st;
    mid.q += 0.5 * dir * dt * a1;
    mid.p += 0.5 * dir * dt * (b1 + CMat::Identity(1, 1));
    mid.t += 0.5 * dir * dt;
    auto [a2, b2] = flow_fields(SystemId::PII, par, mid);
    MatrixState out = st;
    out.q += dir * dt * a2;
    out.p += dir * dt * (b2 + CMat::Identity(1, 1));
    out.t += dir * dt;
    return out;
  };
  const LaxValue mid = lax_pair_eval(SystemId::PII, par, st, z);
  const CMat dA = (lax_pair_eval(SystemId::PII, par, perturbed_step(1), z).A -
                   lax_pair_eval(SystemId::PII, par, perturbed_step(-1), z).A) /
                  (2 * dt);
  const CMat dB = (lax_pair_eval(SystemId::PII, par, st, z + dz).B -
                   lax_pair_eval(SystemId::PII, par, st, z - dz).B) /
                  (2 * dz);
  const double off = (dA - dB + commutator(mid.A, mid.B)).norm() /
                     std::max(1.0, mid.A.norm());
  CHECK(off >= 1e-2);
}

TEST_CASE("PII block symmetry -A(-z) = s1 A(z) s1") {
  suites::Rng rng(5);
  const ParamSet par = suites::random_params(SystemId::PII, rng);
  const MatrixState st = suites::random_state(SystemId::PII, 2, rng);
  const Complex z(0.8, 0.5);
  const CMat A = lax_pair_eval(SystemId::PII, par, st, z).A;
  const CMat Am = lax_pair_eval(SystemId::PII, par, st, -z).A;
  CMat s1 = CMat::Zero(4, 4);
  s1.topRightCorner(2, 2).setIdentity();
  s1.bottomLeftCorner(2, 2).setIdentity();
  CHECK((-Am - s1 * A * s1).norm() < 1e-12);
}

TEST_CASE("state validation") {
  MatrixState st = scalar_state(0.5, 0.5, 0.0);
  CHECK_THROWS_AS(validate_state(SystemId::PV, st), InvalidState);
  st.t = 1.0;
  CHECK_THROWS_AS(validate_state(SystemId::PVI, st), InvalidState);
  st.t = 0.5;
  st.q(0, 0) = 1e-12;
  CHECK_THROWS_AS(validate_state(SystemId::PIII_D8, st), InvalidState);
}
