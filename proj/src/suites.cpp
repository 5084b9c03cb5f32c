#include "cplab/suites.hpp"

#include <algorithm>

namespace cplab::suites {

ParamSet random_params(SystemId sys, Rng& rng) {
  auto c = [&]() { return rng.small_complex(); };
  switch (sys) {
    case SystemId::PVI: return ParamSet::pvi(c(), c(), c(), c());
    case SystemId::PV: return ParamSet::pv(c(), c(), c());
    case SystemId::PIV: return ParamSet::piv(c(), c());
    case SystemId::PIII_D6: return ParamSet::piii_d6(c(), c());
    case SystemId::PIII_D7: return ParamSet::piii_d7(c());
    case SystemId::PIII_D8: return ParamSet::piii_d8();
    case SystemId::PII: return ParamSet::pii(c());
    case SystemId::PI: return ParamSet::pi();
  }
  throw ConfigError("unreachable");
}

MatrixState random_state(SystemId sys, Eigen::Index n, Rng& rng) {
  MatrixState st;
  st.q = rng.small_matrix(n);
  st.p = rng.small_matrix(n);
  if (sys == SystemId::PIII_D8) st.q += 1.5 * CMat::Identity(n, n);
  const auto [t0, t1] = default_window(sys);
  const double u = rng.uniform(0.25, 0.75);
  st.t = t0 + u * (t1 - t0) + Complex(0, rng.uniform(-0.02, 0.02));
  return st;
}

ParticleState random_particles(SystemId sys, Eigen::Index n, Complex g, Rng& rng) {
  ParticleState ps;
  ps.x.resize(n);
  ps.y.resize(n);
  ps.g = g;
  if (sys == SystemId::PV) {
    // xdot ~ x^2 - x: the (0, 1) strip contracts, anything above 1 runs
    // into a movable pole inside the default window
    for (Eigen::Index j = 0; j < n; ++j) {
      ps.x[j] = 0.22 + 0.27 * static_cast<double>(j) + rng.uniform(-0.05, 0.05) +
                Complex(0, rng.uniform(-0.05, 0.05));
      ps.y[j] = rng.small_complex();
    }
  } else {
    const bool positive_side = sys == SystemId::PVI || sys == SystemId::PIII_D6 ||
                               sys == SystemId::PIII_D7 || sys == SystemId::PIII_D8;
    const double base = positive_side ? 1.6 : -1.2;
    for (Eigen::Index j = 0; j < n; ++j) {
      ps.x[j] = base + 1.1 * static_cast<double>(j) + rng.uniform(-0.15, 0.15) +
                Complex(0, rng.uniform(-0.15, 0.15));
      ps.y[j] = rng.small_complex();
    }
    if (sys == SystemId::PVI) ps.x.array() += 0.1;  // clear of {0, 1, t}
  }
  const auto [t0, t1] = default_window(sys);
  ps.t = t0 + rng.uniform(0.25, 0.75) * (t1 - t0);
  return ps;
}

double gradient_consistency(SystemId sys, Eigen::Index n, uint64_t seed,
                            int trials, double h) {
  Rng rng(seed);
  double worst = 0;
  for (int k = 0; k < trials; ++k) {
    const ParamSet par = random_params(sys, rng);
    const MatrixState st = random_state(sys, n, rng);
    worst = std::max(worst, gradient_consistency_residual(sys, par, st, h));
  }
  return worst;
}

double zero_curvature(SystemId sys, Eigen::Index n, uint64_t seed, int n_z,
                      double dt, double dz, double tol) {
  Rng rng(seed);
  const ParamSet par = random_params(sys, rng);
  MatrixState st = random_state(sys, n, rng);
  const auto [t0, t1] = default_window(sys);
  st.t = t0 + 0.3 * (t1 - t0);

  Trajectory tr;
  IntegrateOptions opt;
  opt.n_samples = n_z + 1;
  tr = integrate_matrix_flow(sys, par, st, t0 + 0.7 * (t1 - t0), tol, 0, opt);

  double worst = 0;
  for (int k = 1; k <= n_z; ++k) {
    const MatrixState& at = tr.samples[static_cast<size_t>(k)];
    Complex z;
    for (int tries = 0; tries < 100; ++tries) {
      const double rho = rng.uniform(1.2, 2.2);
      const double phi = rng.uniform(0, 2 * kPi);
      z = rho * std::exp(kI * phi);
      bool clear = true;
      for (Complex pole : spectral_poles(sys, at))
        if (std::abs(z - pole) < 0.35) clear = false;
      if (clear) break;
    }
    worst = std::max(worst, zero_curvature_residual(sys, par, at, z, dt, dz));
  }
  return worst;
}

double commutator_drift_suite(SystemId sys, Eigen::Index n, uint64_t seed,
                              double tol) {
  Rng rng(seed);
  const ParamSet par = random_params(sys, rng);
  const Complex g = 0.4 + 0.2 * kI;
  ParticleState ps = random_particles(sys, n, g, rng);
  const auto [t0, t1] = default_window(sys);
  ps.t = t0;
  auto [X, Y] = orbit_embed(ps);
  const MatrixState st0{X, Y, t0};
  const Trajectory tr = integrate_matrix_flow(sys, par, st0, t1, tol);
  return commutator_drift(tr);
}

KksResult kks_roundtrip(Eigen::Index n, uint64_t seed, int count) {
  Rng rng(seed);
  KksResult out{0, 0};
  for (int k = 0; k < count; ++k) {
    const Complex g = rng.small_complex(0.8) + Complex(0.3, 0.1);
    ParticleState ps;
    ps.x.resize(n);
    ps.y.resize(n);
    ps.g = g;
    for (Eigen::Index j = 0; j < n; ++j) {
      ps.x[j] = -1.0 + 1.2 * static_cast<double>(j) + rng.uniform(-0.2, 0.2) +
                Complex(0, rng.uniform(-0.3, 0.3));
      ps.y[j] = rng.small_complex(0.6);
    }
    auto [X, Y] = orbit_embed(ps);

    // well-conditioned random gauge
    CMat G;
    while (true) {
      G = rng.small_matrix(n, 1.0) + 1.2 * CMat::Identity(n, n);
      Eigen::JacobiSVD<CMat> svd(G);
      if (svd.singularValues()(0) / svd.singularValues()(n - 1) < 30) break;
    }
    const CMat Gi = G.partialPivLu().inverse();
    const OrbitFrame fr = kks_normalize(G * X * Gi, G * Y * Gi, g);

    CVec xs = ps.x;
    std::sort(xs.begin(), xs.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    for (Eigen::Index j = 0; j < n; ++j)
      out.x_error = std::max(out.x_error, std::abs(fr.X(j, j) - xs[j]));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) {
          const Complex want = kI * g / (fr.X(i, i) - fr.X(j, j));
          out.ylaw_error = std::max(
              out.ylaw_error,
              std::abs(fr.Y(i, j) - want) / std::max(1.0, std::abs(want)));
        }
  }
  return out;
}

double gauge_equation(SystemId sys, uint64_t seed, int check_points) {
  Rng rng(seed);
  const Eigen::Index n = 2;
  const ParamSet par = random_params(sys, rng);
  const Complex g = 0.35 + 0.15 * kI;
  ParticleState ps = random_particles(sys, n, g, rng);
  for (Eigen::Index j = 0; j < n; ++j) ps.y[j] = rng.small_complex(0.15);
  const auto [t0, t1] = default_window(sys);
  ps.t = t0;
  auto [X0, Y0] = orbit_embed(ps);
  Trajectory tr;
  IntegrateOptions opt;
  opt.n_samples = check_points + 2;
  // first third of the window keeps the checked states well clear of
  // movable poles for generic data
  tr = integrate_matrix_flow(sys, par, MatrixState{X0, Y0, t0},
                             t0 + 0.3 * (t1 - t0), 1e-12, 0, opt);

  const double delta = 1e-4;
  double worst = 0;
  for (int k = 1; k <= check_points; ++k) {
    const MatrixState& st = tr.samples[static_cast<size_t>(k)];
    const OrbitFrame fr = kks_normalize(st.q, st.p, g);

    // match a neighbor frame's eigenvalues to the center frame
    auto matched = [&](const OrbitFrame& f) {
      CVec m(n);
      std::vector<bool> used(static_cast<size_t>(n), false);
      for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index arg = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (used[static_cast<size_t>(j)]) continue;
          const double d = std::abs(f.X(j, j) - fr.X(i, i));
          if (d < best) { best = d; arg = j; }
        }
        used[static_cast<size_t>(arg)] = true;
        m[i] = f.X(arg, arg);
      }
      return m;
    };

    // five-point derivative of the eigenvalue tracks
    std::vector<Complex> nodes;
    std::vector<CVec> xs;
    for (int off = -2; off <= 2; ++off) {
      const Complex tt = st.t + static_cast<double>(off) * delta;
      nodes.push_back(tt);
      if (off == 0) {
        CVec x0(n);
        for (Eigen::Index i = 0; i < n; ++i) x0[i] = fr.X(i, i);
        xs.push_back(x0);
      } else {
        const MatrixState nb = advance_state(sys, par, st, tt, 1e-13);
        xs.push_back(matched(kks_normalize(nb.q, nb.p, g)));
      }
    }
    const std::vector<Complex> wgt = first_derivative_weights(nodes, st.t);
    CMat xdot = CMat::Zero(n, n);
    for (size_t m = 0; m < nodes.size(); ++m)
      for (Eigen::Index i = 0; i < n; ++i) xdot(i, i) += wgt[m] * xs[m][i];

    CVec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = fr.X(i, i);
    const FMatrix F = f_matrix(sys, par, x, st.t, g);
    const MatrixState frame_state{fr.X, fr.Y, st.t};
    const CMat acal = flow_fields(sys, par, frame_state).first;
    const CMat resid = xdot - acal - commutator(fr.X, F.F);
    worst = std::max(worst, resid.norm());
  }
  return worst;
}

double spectral_match_suite(SystemId sys, uint64_t seed, double tol,
                            int n_samples) {
  Rng rng(seed);
  const Eigen::Index n = 2;
  const ParamSet par = random_params(sys, rng);
  const Complex g = 0.4 + 0.2 * kI;
  ParticleState ps = random_particles(sys, n, g, rng);
  const auto [t0, t1] = default_window(sys);
  ps.t = t0;
  auto [X, Y] = orbit_embed(ps);
  IntegrateOptions opt;
  opt.n_samples = n_samples;
  const Trajectory tr =
      integrate_matrix_flow(sys, par, MatrixState{X, Y, t0}, t1, tol, 0, opt);
  const std::vector<ParticleState> pr =
      integrate_particle_flow(sys, par, ps, t1, tol, 0, opt);
  return spectral_match(tr, pr);
}

FRowResult f_row_law(uint64_t seed) {
  Rng rng(seed);
  FRowResult out{0, 0};
  for (SystemId sys : kAllSystems) {
    for (Eigen::Index n : {2, 3}) {
      const ParamSet par = random_params(sys, rng);
      const Complex g = rng.small_complex(0.8) + Complex(0.4, 0);
      ParticleState ps = random_particles(sys, n, g, rng);
      const FMatrix F = f_matrix(sys, par, ps.x, ps.t, g);
      for (Eigen::Index j = 0; j < n; ++j) {
        Complex row = 0;
        for (Eigen::Index k = 0; k < n; ++k)
          if (k != j) row += F.F(j, k);
        out.row_law = std::max(out.row_law, std::abs(F.F(j, j) + row - F.K));
      }
    }
  }
  // PII n=2 diagonal vanishes identically
  ParticleState ps;
  ps.x.resize(2);
  ps.y.resize(2);
  ps.x << Complex(-0.9, 0.2), Complex(1.1, -0.4);
  ps.y << Complex(0.1), Complex(-0.2);
  ps.g = 0.7 + 0.2 * kI;
  ps.t = 0.3;
  const FMatrix F = f_matrix(SystemId::PII, ParamSet::pii(0.3), ps.x, ps.t, ps.g);
  out.pii_diag = std::max(std::abs(F.F(0, 0)), std::abs(F.F(1, 1)));
  return out;
}

EllipticResult elliptic_identities(int trunc_n) {
  EllipticResult out{0, 0};
  const std::array<Complex, 3> taus = {Complex(0, 1), Complex(0.5, 1),
                                       Complex(0, 2)};
  for (Complex tau : taus) {
    EllipticContext ctx(tau, trunc_n);
    const auto e = ctx.e();
    out.e_sum = std::max(out.e_sum, std::abs(e[0] + e[1] + e[2]));
    const Complex u = Complex(0.3, 0.2);
    const WpJet j = wp_jet(ctx, u);
    const Complex lhs = j.wp_prime * j.wp_prime;
    const Complex rhs =
        4.0 * (j.wp - e[0]) * (j.wp - e[1]) * (j.wp - e[2]);
    out.cubic = std::max(out.cubic, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return out;
}

double canonical_symplectic(SystemId sys, uint64_t seed, int points, double h) {
  Rng rng(seed);
  double worst = 0;
  for (int k = 0; k < points; ++k) {
    const ParamSet par = random_params(sys, rng);
    CanonicalOptions opt;
    ParticleState ps;
    ps.x.resize(1);
    ps.y.resize(1);
    ps.g = 0;
    if (sys == SystemId::PVI) {
      const Complex tau = Complex(0.5, 0.9) + Complex(0, rng.uniform(0, 0.3));
      EllipticContext ctx(tau, 40);
      opt.tau = tau;
      opt.elliptic_n = 40;
      ps.t = lambda_t(ctx);
      ps.x[0] = 2.4 + rng.uniform(-0.3, 0.5) + Complex(0, rng.uniform(-0.3, 0.3));
    } else {
      const auto [t0, t1] = default_window(sys);
      ps.t = t0 + rng.uniform(0.3, 0.7) * (t1 - t0);
      ps.x[0] = 0.9 + rng.uniform(0, 1.2) + Complex(0, rng.uniform(-0.35, 0.35));
    }
    ps.y[0] = rng.small_complex(0.6);
    worst = std::max(worst, symplectic_residual(sys, par, ps, h, opt));
  }
  return worst;
}

double pushforward(SystemId sys, uint64_t seed, int n_samples) {
  Rng rng(seed);
  const ParamSet par = random_params(sys, rng);
  ParticleState ps;
  ps.x.resize(1);
  ps.y.resize(1);
  ps.g = 0;
  ps.x[0] = 1.1 + rng.uniform(0, 0.4) + Complex(0, rng.uniform(-0.15, 0.15));
  ps.y[0] = rng.small_complex(0.4);
  const auto [t0, t1] = default_window(sys);
  ps.t = t0 == Complex(0) ? Complex(0.05) : t0;
  IntegrateOptions opt;
  opt.n_samples = n_samples;
  const std::vector<ParticleState> tr =
      integrate_particle_flow(sys, par, ps, t1, 1e-12, 0, opt);
  return pushforward_dynamics_residual(sys, par, tr);
}

StokesSuiteResult stokes_commutative(uint64_t seed, int points) {
  Rng rng(seed);
  StokesSuiteResult out{0, 0, true};

  for (int k = 0; k < points; ++k) {
    const Eigen::Index n = 1 + (k % 3);
    const Complex theta = rng.small_complex(0.6);
    const bool minus = (k % 2) == 1;
    // entrywise cubic with nu = -theta for Q = 1, nu = +theta for Q = -1
    const Complex nu = minus ? theta : -theta;
    CMat A = CMat::Zero(n, n), B = CMat::Zero(n, n), C = CMat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex a = rng.small_complex(0.9);
      const Complex b = rng.small_complex(0.9);
      const Complex c = (-2.0 * kI * std::sin(kPi * nu) - a - b) / (1.0 + a * b);
      A(j, j) = a;
      B(j, j) = b;
      C(j, j) = c;
    }
    const CMat Q = (minus ? -1.0 : 1.0) * CMat::Identity(n, n);
    const StokesData sd{A, B, C, Q, theta};
    const std::array<double, 5> r = stokes_residuals(sd);
    out.commutative = std::max(out.commutative, *std::max_element(r.begin(), r.end()));
  }

  {
    // n = 1 conjugacy-class check of the loop product
    const Complex theta = 0.31 - 0.12 * kI;
    const Complex a = rng.small_complex(0.8), b = rng.small_complex(0.8);
    const Complex c = (2.0 * kI * std::sin(kPi * theta) - a - b) / (1.0 + a * b);
    CMat A(1, 1), B(1, 1), C(1, 1), Q(1, 1);
    A << a; B << b; C << c; Q << 1.0;
    const CMat M0 = monodromy_product({A, B, C, Q, theta}).partialPivLu().inverse();
    Eigen::ComplexEigenSolver<CMat> es(M0, false);
    const Complex e0 = std::exp(-2.0 * kI * kPi * theta);
    const Complex e1 = std::exp(2.0 * kI * kPi * theta);
    const Complex l0 = es.eigenvalues()[0], l1 = es.eigenvalues()[1];
    out.monodromy_eig = std::min(
        std::max(std::abs(l0 - e0), std::abs(l1 - e1)),
        std::max(std::abs(l0 - e1), std::abs(l1 - e0)));
  }

  out.parity_table_ok =
      coupling_parity(Complex(0, -2), 3) == Parity::Qplus &&
      coupling_parity(Complex(0, -1), 2) == Parity::Qminus &&
      coupling_parity(Complex(0, -1), 3) == Parity::Mixed;
  return out;
}

double sylvester(uint64_t seed, int count) {
  Rng rng(seed);
  double worst = 0;
  for (int k = 0; k < count; ++k) {
    const Eigen::Index n = 2 + (k % 3);
    const CMat km = rng.small_matrix(n, 0.45);
    const CMat r = rng.small_matrix(n, 1.0);
    const CMat y = sylvester_ad_solve(km, r);
    worst = std::max(worst,
                     (y + km * y - y * km - r).norm() / std::max(1.0, r.norm()));
  }
  return worst;
}

}  // namespace cplab::suites
