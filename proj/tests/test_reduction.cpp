#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cplab/reduction.hpp"
#include "cplab/suites.hpp"

using namespace cplab;

namespace {

ParticleState two_particles(Complex x0, Complex x1, Complex y0, Complex y1,
                            Complex t, Complex g) {
  ParticleState ps;
  ps.x.resize(2);
  ps.y.resize(2);
  ps.x << x0, x1;
  ps.y << y0, y1;
  ps.t = t;
  ps.g = g;
  return ps;
}

}  // namespace

TEST_CASE("orbit_embed basics") {
  ParticleState one;
  one.x = CVec::Constant(1, Complex(5));
  one.y = CVec::Constant(1, Complex(7));
  one.g = 0.3;
  auto [X1, Y1] = orbit_embed(one);
  CHECK(X1(0, 0) == Complex(5));
  CHECK(Y1(0, 0) == Complex(7));

  const Complex g(0.4, 0.7);
  auto [X, Y] = orbit_embed(two_particles(1, -1, 0, 0, 0, g));
  CHECK(std::abs(Y(0, 1) - kI * g / 2.0) < 1e-15);
  CHECK(std::abs(Y(1, 0) + kI * g / 2.0) < 1e-15);
  const CMat comm = commutator(Y, X);
  CHECK(std::abs(comm(0, 0)) < 1e-15);
  CHECK(std::abs(comm(0, 1) + kI * g) < 1e-15);
  CHECK(std::abs(comm(1, 0) + kI * g) < 1e-15);

  CHECK_THROWS_AS(orbit_embed(two_particles(1, 1, 0, 0, 0, g)),
                  ParticleCollision);
}

TEST_CASE("kks_normalize is a fixed point on embedded data") {
  suites::Rng rng(2);
  const Complex g(0.5, -0.2);
  ParticleState ps = suites::random_particles(SystemId::PII, 3, g, rng);
  auto [X, Y] = orbit_embed(ps);
  const OrbitFrame fr = kks_normalize(X, Y, g);
  // X reproduced up to the canonical sort
  CVec xs = ps.x;
  std::sort(xs.begin(), xs.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(std::abs(fr.X(i, i) - xs[i]) < 1e-10);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      if (i != j)
        CHECK(std::abs(fr.Y(i, j) - kI * g / (fr.X(i, i) - fr.X(j, j))) < 1e-10);
  CHECK(std::abs(fr.C.partialPivLu().determinant() - 1.0) < 1e-10);
}

TEST_CASE("kks_normalize undoes a random gauge") {
  const suites::KksResult r = suites::kks_roundtrip(3, 7, 10);
  CHECK(r.x_error <= 1e-8);
  CHECK(r.ylaw_error <= 1e-10);
}

TEST_CASE("kks_normalize rejects off-orbit data") {
  CMat q = CMat::Zero(2, 2), p = CMat::Zero(2, 2);
  q.diagonal() << Complex(0.4), Complex(-1.0);
  p.diagonal() << Complex(0.2), Complex(0.9);
  // [p, q] = 0 but g != 0
  CHECK_THROWS_AS(kks_normalize(q, p, Complex(0.5)), OffOrbit);
}

TEST_CASE("f_matrix row law and PII values") {
  const Complex g(0.8, 0.1);
  const Complex x0(-0.7, 0.3), x1(1.2, -0.2);
  const FMatrix F = f_matrix(SystemId::PII, ParamSet::pii(0), CVec{{x0, x1}},
                             0.4, g);
  const Complex want = -kI * g / ((x0 - x1) * (x0 - x1));
  CHECK(std::abs(F.F(0, 1) - want) < 1e-15);
  CHECK(std::abs(F.F(1, 0) - want) < 1e-15);
  CHECK(std::abs(F.K - want) < 1e-15);
  CHECK(std::abs(F.F(0, 0)) < 1e-15);
  CHECK(std::abs(F.F(1, 1)) < 1e-15);
}

TEST_CASE("f_matrix PIV hand value") {
  const Complex g(0.6, -0.4);
  const FMatrix F = f_matrix(SystemId::PIV, ParamSet::piv(0, 0),
                             CVec{{Complex(2), Complex(1)}}, 0.3, g);
  CHECK(std::abs(F.F(0, 1) + 3.0 * kI * g) < 1e-14);
}

TEST_CASE("f_matrix n=1 is the zero 1x1 matrix") {
  const FMatrix F = f_matrix(SystemId::PI, ParamSet::pi(),
                             CVec::Constant(1, Complex(2, 1)), 0.5, 0.7);
  CHECK(std::abs(F.K) == 0.0);
  CHECK(std::abs(F.F(0, 0)) == 0.0);
}

TEST_CASE("f_matrix off-diagonal equals the commutator law") {
  // (x_i - x_j)^2 F_ij = ([Acal(X,Y,t), X])_ij with Y on the orbit
  suites::Rng rng(12);
  for (SystemId sys : kAllSystems) {
    const ParamSet par = suites::random_params(sys, rng);
    const Complex g(0.45, 0.25);
    ParticleState ps = suites::random_particles(sys, 3, g, rng);
    auto [X, Y] = orbit_embed(ps);
    const CMat acal = flow_fields(sys, par, MatrixState{X, Y, ps.t}).first;
    const CMat law = commutator(acal, X);
    const FMatrix F = f_matrix(sys, par, ps.x, ps.t, g);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        if (i != j) {
          const Complex d = ps.x[i] - ps.x[j];
          INFO(to_string(sys));
          CHECK(std::abs(F.F(i, j) - law(i, j) / (d * d)) < 1e-10);
        }
  }
}

TEST_CASE("diagonal-gauge neutrality: [X, F] has zero diagonal") {
  suites::Rng rng(13);
  const Complex g(0.3, 0.6);
  ParticleState ps = suites::random_particles(SystemId::PV, 3, g, rng);
  const FMatrix F =
      f_matrix(SystemId::PV, suites::random_params(SystemId::PV, rng), ps.x,
               ps.t, g);
  const CMat XF = commutator(CMat(ps.x.asDiagonal()), F.F);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(XF(i, i)) == 0.0);
}

TEST_CASE("reduced hamiltonian scalar examples") {
  ParticleState a;
  a.x = CVec::Constant(1, Complex(0));
  a.y = CVec::Constant(1, Complex(1));
  a.t = 0;
  a.g = 0;
  CHECK(std::abs(reduced_hamiltonian(SystemId::PII, ParamSet::pii(0), a) -
                 Complex(0.5)) < 1e-15);

  const Complex g(0.7, 0.4);
  const ParticleState b = two_particles(0, 1, 0, 0, 0, g);
  CHECK(std::abs(reduced_hamiltonian(SystemId::PII, ParamSet::pii(0), b) -
                 (g * g - 0.5)) < 1e-15);

  ParticleState c;
  c.x = CVec::Constant(1, Complex(0));
  c.y = CVec::Constant(1, Complex(0));
  c.t = 0.77;
  c.g = 0;
  CHECK(std::abs(reduced_hamiltonian(SystemId::PI, ParamSet::pi(), c)) < 1e-15);
}

TEST_CASE("PVI reduced hamiltonian: both printed groupings agree") {
  suites::Rng rng(19);
  const ParamSet par = suites::random_params(SystemId::PVI, rng);
  for (int rep = 0; rep < 5; ++rep) {
    const Complex g = rng.small_complex(0.9);
    ParticleState ps = suites::random_particles(SystemId::PVI, 3, g, rng);
    const Complex h1 = reduced_hamiltonian(SystemId::PVI, par, ps);
    // regrouped form: constant term (theta^2 - k^2 + 60 g^2 (n-1))/4 and
    // coupling written as (4g)^2/2 * (pair/8 - 2(x_j + x_k))
    const Eigen::Index n = ps.n();
    Complex s = 0;
    const Complex th = par.theta, k = par.k, t = ps.t;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex x = ps.x[i], y = ps.y[i];
      s += x * (x - 1.0) * (x - t) * y * y -
           (par.theta_t * x * (x - 1.0) + par.theta1 * x * (x - t) +
            par.theta0 * (x - 1.0) * (x - t)) * y +
           0.25 * (th * th - k * k + 60.0 * g * g * static_cast<double>(n - 1)) * x;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Complex a = ps.x[i], bb = ps.x[j];
        s += 16.0 * g * g / 2.0 *
             ((a * (a - 1.0) * (a - t) + bb * (bb - 1.0) * (bb - t)) /
                  (8.0 * (a - bb) * (a - bb)) -
              2.0 * (a + bb));
      }
    const Complex h2 = s / (t * (t - 1.0));
    CHECK(std::abs(h1 - h2) < 1e-12 * std::max(1.0, std::abs(h1)));
  }
}

TEST_CASE("particle fields match finite differences of the hamiltonian") {
  suites::Rng rng(23);
  for (SystemId sys : kAllSystems) {
    const ParamSet par = suites::random_params(sys, rng);
    const Complex g = rng.small_complex(0.7);
    ParticleState ps = suites::random_particles(sys, 2, g, rng);
    auto [dx, dy] = particle_flow_fields(sys, par, ps);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 2; ++i) {
      auto H = [&](Complex ddx, Complex ddy) {
        ParticleState s = ps;
        s.x[i] += ddx;
        s.y[i] += ddy;
        return reduced_hamiltonian(sys, par, s);
      };
      const Complex fdx = (H(0, h) - H(0, -h)) / (2 * h);
      const Complex fdy = -(H(h, 0) - H(-h, 0)) / (2 * h);
      INFO(to_string(sys), " i=", i);
      CHECK(std::abs(dx[i] - fdx) < 1e-6 * std::max(1.0, std::abs(fdx)));
      CHECK(std::abs(dy[i] - fdy) < 1e-6 * std::max(1.0, std::abs(fdy)));
    }
  }
}

TEST_CASE("PII particle fields: uncoupled and coupled") {
  ParticleState one;
  one.x = CVec::Constant(1, Complex(0.4, 0.2));
  one.y = CVec::Constant(1, Complex(-0.3, 0.1));
  one.t = Complex(0.5);
  one.g = 0;
  const Complex theta(0.21, -0.33);
  auto [dx, dy] = particle_flow_fields(SystemId::PII, ParamSet::pii(theta), one);
  CHECK(std::abs(dx[0] - one.y[0]) < 1e-15);
  const Complex want =
      2.0 * one.x[0] * one.x[0] * one.x[0] + one.t * one.x[0] + theta;
  CHECK(std::abs(dy[0] - want) < 1e-15);

  const Complex g(0.8, -0.1);
  const ParticleState two = two_particles(0.9, -0.8, 0.1, 0.2, 0.5, g);
  auto [dx2, dy2] = particle_flow_fields(SystemId::PII, ParamSet::pii(theta), two);
  const Complex coup = 2.0 * g * g / std::pow(two.x[0] - two.x[1], 3.0);
  const Complex base =
      2.0 * two.x[0] * two.x[0] * two.x[0] + two.t * two.x[0] + theta;
  CHECK(std::abs(dy2[0] - base - coup) < 1e-14);
}

TEST_CASE("particle flow: stationary and time reversal") {
  ParticleState ps;
  ps.x = CVec::Constant(1, Complex(0));
  ps.y = CVec::Constant(1, Complex(0));
  ps.t = 0;
  ps.g = 0;
  const auto tr = integrate_particle_flow(SystemId::PII, ParamSet::pii(0), ps,
                                          1.0, 1e-10);
  for (const ParticleState& s : tr) {
    CHECK(std::abs(s.x[0]) < 1e-14);
    CHECK(std::abs(s.y[0]) < 1e-14);
  }

  suites::Rng rng(3);
  ParticleState p2 = suites::random_particles(SystemId::PII, 2, Complex(0, 2), rng);
  const double tol = 1e-10;
  const auto fwd =
      integrate_particle_flow(SystemId::PII, ParamSet::pii(0), p2, p2.t + 0.7, tol);
  const auto back = integrate_particle_flow(SystemId::PII, ParamSet::pii(0),
                                            fwd.back(), p2.t, tol);
  CHECK((back.back().x - p2.x).norm() + (back.back().y - p2.y).norm() <=
        10 * tol);
}

TEST_CASE("PII symmetric data stays symmetric under x -> -x") {
  ParticleState ps = two_particles(1, -1, 0, 0, 0, Complex(0, 2));
  const auto tr =
      integrate_particle_flow(SystemId::PII, ParamSet::pii(0), ps, 0.8, 1e-11);
  for (const ParticleState& s : tr) {
    CHECK(std::abs(s.x[0] + s.x[1]) < 1e-8);
    CHECK(std::abs(s.y[0] + s.y[1]) < 1e-8);
  }
}

TEST_CASE("spectral match: trivial, full, and fault-injected") {
  Trajectory tr;
  tr.sys = SystemId::PII;
  tr.par = ParamSet::pii(0);
  ParticleState ps = two_particles(-1.1, 0.9, 0.1, -0.2, 1.0, Complex(0.4, 0.2));
  auto [X, Y] = orbit_embed(ps);
  tr.samples.push_back(MatrixState{X, Y, ps.t});
  CHECK(spectral_match(tr, {ps}) < 1e-14);

  const double match = suites::spectral_match_suite(SystemId::PII, 9);
  CHECK(match <= 1e-6);

  // perturbing the particle momenta must be detected
  suites::Rng rng(9);
  const ParamSet par = suites::random_params(SystemId::PII, rng);
  const Complex g = 0.4 + 0.2 * kI;
  ParticleState p0 = suites::random_particles(SystemId::PII, 2, g, rng);
  const auto [t0, t1] = default_window(SystemId::PII);
  p0.t = t0;
  auto [X2, Y2] = orbit_embed(p0);
  IntegrateOptions opt;
  const Trajectory mt = integrate_matrix_flow(SystemId::PII, par,
                                              MatrixState{X2, Y2, t0}, t1, 1e-11);
  ParticleState bad = p0;
  bad.y[0] += 0.1;
  const auto pr = integrate_particle_flow(SystemId::PII, par, bad, t1, 1e-11);
  CHECK(spectral_match(mt, pr) >= 1e-3);
}

TEST_CASE("grid mismatch is rejected") {
  Trajectory tr;
  tr.sys = SystemId::PII;
  ParticleState ps = two_particles(-1, 1, 0, 0, 0, 0.5);
  auto [X, Y] = orbit_embed(ps);
  tr.samples.push_back(MatrixState{X, Y, Complex(0)});
  tr.samples.push_back(MatrixState{X, Y, Complex(0.5)});
  ParticleState later = ps;
  later.t = 0.25;
  CHECK_THROWS_AS(spectral_match(tr, {ps, later}), GridMismatch);
  CHECK_THROWS_AS(spectral_match(tr, {ps}), GridMismatch);
}

TEST_CASE("gauge equation along trajectories") {
  uint64_t seed = 500;
  for (SystemId sys : {SystemId::PII, SystemId::PIV, SystemId::PIII_D7}) {
    const double r = suites::gauge_equation(sys, seed++, 3);
    INFO(to_string(sys), " residual=", r);
    CHECK(r <= 1e-6);
  }
}
