#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cplab/canonical.hpp"
#include "cplab/suites.hpp"

using namespace cplab;

namespace {

ParticleState one_particle(SystemId sys, Complex x, Complex y, Complex t,
                           Complex g = 0) {
  ParticleState ps;
  ps.x = CVec::Constant(1, x);
  ps.y = CVec::Constant(1, y);
  ps.t = t;
  ps.g = g;
  (void)sys;
  return ps;
}

}  // namespace

TEST_CASE("PIV map: q = 2 sqrt(x)") {
  const ParamSet par = ParamSet::piv(0.3, -0.2);
  const PhysicalPoint ph =
      map_to_physical(SystemId::PIV, par, one_particle(SystemId::PIV, 1, 0.4, 0.6));
  CHECK(std::abs(ph.q[0] - 2.0) < 1e-14);
  CHECK(ph.T == Complex(0.6));
}

TEST_CASE("PIII_D8 map reference values") {
  const double e = std::exp(1.0);
  const PhysicalPoint ph = map_to_physical(
      SystemId::PIII_D8, ParamSet::piii_d8(), one_particle(SystemId::PIII_D8, 1, 0, e));
  CHECK(std::abs(ph.q[0]) < 1e-15);
  CHECK(std::abs(ph.p[0] - 0.5) < 1e-15);
  CHECK(std::abs(ph.T - 1.0) < 1e-15);
}

TEST_CASE("PV first step inverts x = Q/(Q-1)") {
  // x = 2 corresponds to Q = 2
  const ParamSet par = ParamSet::pv(0.1, -0.2, 0.3);
  const ParticleState ps = one_particle(SystemId::PV, 2, 0.3, 1.5);
  const PhysicalPoint ph = map_to_physical(SystemId::PV, par, ps);
  // recover Q from the printed relation sqrt(Q) = -coth(q/2)
  const Complex w = -1.0 / std::tanh(0.5 * ph.q[0]);
  CHECK(std::abs(w * w - 2.0) < 1e-12);
}

TEST_CASE("identity maps for PII and PI") {
  const ParticleState ps = one_particle(SystemId::PII, Complex(0.3, 0.1),
                                        Complex(-0.2, 0.4), 0.7);
  const PhysicalPoint ph = map_to_physical(SystemId::PII, ParamSet::pii(0.2), ps);
  CHECK(ph.q[0] == ps.x[0]);
  CHECK(ph.p[0] == ps.y[0]);
  CHECK(ph.T == ps.t);
  CHECK(symplectic_residual(SystemId::PII, ParamSet::pii(0.2), ps, 1e-6) <= 1e-10);
}

TEST_CASE("roundtrip through every map") {
  suites::Rng rng(31);
  for (SystemId sys : {SystemId::PV, SystemId::PIV, SystemId::PIII_D6,
                       SystemId::PIII_D7, SystemId::PIII_D8, SystemId::PII,
                       SystemId::PI}) {
    const ParamSet par = suites::random_params(sys, rng);
    for (int rep = 0; rep < 4; ++rep) {
      const Complex x = 0.9 + rng.uniform(0, 1.2) + Complex(0, rng.uniform(-0.3, 0.3));
      const Complex y = rng.small_complex(0.6);
      const auto [t0, t1] = default_window(sys);
      const Complex t = t0 + rng.uniform(0.3, 0.7) * (t1 - t0);
      const ParticleState ps = one_particle(sys, x, y, t);
      const PhysicalPoint ph = map_to_physical(sys, par, ps);
      const ParticleState back = map_from_physical(sys, par, ph, 0);
      INFO(to_string(sys));
      CHECK(std::abs(back.x[0] - x) < 1e-8);
      CHECK(std::abs(back.y[0] - y) < 1e-8);
      CHECK(std::abs(back.t - t) < 1e-8 * std::max(1.0, std::abs(t)));
    }
  }
}

TEST_CASE("PVI map roundtrip and local inverse") {
  suites::Rng rng(41);
  const ParamSet par = suites::random_params(SystemId::PVI, rng);
  CanonicalOptions opt;
  opt.tau = Complex(0.5, 0.9);
  EllipticContext ctx(*opt.tau, opt.elliptic_n);
  const Complex t = lambda_t(ctx);
  for (int rep = 0; rep < 3; ++rep) {
    const Complex x = 2.4 + rng.uniform(-0.3, 0.5) + Complex(0, rng.uniform(-0.3, 0.3));
    const Complex y = rng.small_complex(0.5);
    ParticleState ps = one_particle(SystemId::PVI, x, y, t);
    const PhysicalPoint ph = map_to_physical(SystemId::PVI, par, ps, opt);
    const ParticleState back = map_from_physical(SystemId::PVI, par, ph, 0, opt);
    CHECK(std::abs(back.x[0] - x) < 1e-8);
    CHECK(std::abs(back.y[0] - y) < 1e-8);
    CHECK(std::abs(back.t - t) < 1e-9);
  }
}

TEST_CASE("tau inversion recovers the modular parameter") {
  for (Complex tau : {Complex(0, 1), Complex(0.5, 0.9), Complex(0.2, 1.2)}) {
    EllipticContext ctx(tau, 40);
    const Complex t = lambda_t(ctx);
    const Complex got = pvi_tau_from_t(t, {}, 40);
    // the recovered tau must reproduce t (tau itself is gauge up to the
    // modular group)
    EllipticContext check(got, 40);
    CHECK(std::abs(lambda_t(check) - t) < 1e-9);
  }
}

TEST_CASE("symplectic residual across all maps") {
  uint64_t seed = 600;
  for (SystemId sys : kAllSystems) {
    const double r = suites::canonical_symplectic(sys, seed++, 4);
    INFO(to_string(sys), " residual=", r);
    CHECK(r <= 1e-6);
  }
}

TEST_CASE("PIII_D8 symplectic at a hand-checked point") {
  const ParticleState ps = one_particle(SystemId::PIII_D8, 1, 0, 1.5);
  CHECK(symplectic_residual(SystemId::PIII_D8, ParamSet::piii_d8(), ps, 1e-6) <=
        1e-8);
}

TEST_CASE("PIV symplectic at a hand-checked point") {
  const ParticleState ps = one_particle(SystemId::PIV, 1, 0.3, 0.0);
  CHECK(symplectic_residual(SystemId::PIV, ParamSet::piv(0.2, 0.1), ps, 1e-6) <=
        1e-6);
}

TEST_CASE("pushforward dynamics for PIII_D8 and PIV") {
  CHECK(suites::pushforward(SystemId::PIII_D8, 71) <= 1e-4);
  CHECK(suites::pushforward(SystemId::PIV, 72) <= 1e-4);
}

TEST_CASE("pushforward of the identity map equals the flow residual") {
  suites::Rng rng(73);
  const ParamSet par = ParamSet::pii(0.12);
  ParticleState ps = one_particle(SystemId::PII, Complex(0.4, 0.1),
                                  Complex(0.2, -0.1), 0.0);
  IntegrateOptions opt;
  opt.n_samples = 257;
  const auto tr =
      integrate_particle_flow(SystemId::PII, par, ps, 1.0, 1e-12, 0, opt);
  CHECK(pushforward_dynamics_residual(SystemId::PII, par, tr) <= 1e-6);
}

TEST_CASE("pushforward flags non-solution input") {
  const ParamSet par = ParamSet::piii_d8();
  std::vector<ParticleState> frozen;
  for (int k = 0; k < 9; ++k) {
    ParticleState ps = one_particle(SystemId::PIII_D8, 1.2, 0.3, 1.0 + 0.1 * k);
    frozen.push_back(ps);  // states do not evolve: not a solution
  }
  CHECK(pushforward_dynamics_residual(SystemId::PIII_D8, par, frozen) > 0.1);
}

TEST_CASE("PVI pushforward diagnostic stays bounded") {
  // diagnostic only: the t(tau) inversion and the printed constants make
  // this a smoke bound, not an acceptance gate
  suites::Rng rng(79);
  const ParamSet par = suites::random_params(SystemId::PVI, rng);
  CanonicalOptions opt;
  opt.tau = Complex(0.5, 0.9);
  EllipticContext ctx(*opt.tau, 40);
  const Complex t0 = lambda_t(ctx);
  ParticleState ps = one_particle(SystemId::PVI, Complex(2.5, 0.3),
                                  Complex(0.25, -0.1), t0);
  IntegrateOptions iopt;
  iopt.n_samples = 33;
  const auto tr = integrate_particle_flow(SystemId::PVI, par, ps, t0 + 0.04,
                                          1e-12, 0, iopt);
  const double r = pushforward_dynamics_residual(SystemId::PVI, par, tr, opt);
  CHECK(std::isfinite(r));
  CHECK(r < 1.0);
}

TEST_CASE("PVI constants block") {
  const ParamSet par = ParamSet::pvi(Complex(0.2, 0.1), Complex(-0.3, 0.2),
                                     Complex(0.4, -0.1), Complex(0.5, 0.3));
  const Complex g(0.7, -0.2);
  const auto c = pvi_constants(par, 3, g);
  CHECK(std::abs(c[0] - 0.5 * (par.k * par.k - 60.0 * g * g * 2.0)) < 1e-14);
  CHECK(std::abs(c[1] - 0.5 * par.theta0 * par.theta0) < 1e-15);
  CHECK(std::abs(c[2] - 0.5 * par.theta1 * par.theta1) < 1e-15);
  CHECK(std::abs(c[3] - 0.5 * (par.theta_t * par.theta_t + 1.0)) < 1e-15);
}

TEST_CASE("branch domain violations are reported") {
  const ParamSet par = ParamSet::piv(0.3, 0.1);
  CHECK_THROWS_AS(map_to_physical(SystemId::PIV, par,
                                  one_particle(SystemId::PIV, Complex(-1, 0), 0.2, 0.5)),
                  BranchDomain);
  CHECK_THROWS_AS(map_to_physical(SystemId::PIII_D7, ParamSet::piii_d7(0.1),
                                  one_particle(SystemId::PIII_D7, Complex(-2, 0), 0.2, 1.5)),
                  BranchDomain);
}
