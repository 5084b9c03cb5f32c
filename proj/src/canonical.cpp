#include "cplab/canonical.hpp"

#include <cmath>

namespace cplab {

namespace {

constexpr double kCutTol = 1e-12;

void check_off_log_cut(Complex z, const char* what) {
  if (std::abs(z) < kCutTol)
    throw BranchDomain(std::string(what) + " at the origin");
  if (z.real() < 0 && std::abs(z.imag()) < kCutTol * std::max(1.0, -z.real()))
    throw BranchDomain(std::string(what) + " on the principal log/sqrt cut");
}

Complex wp_invert(const EllipticContext& ctx, Complex target,
                  std::optional<Complex> seed) {
  Complex q;
  if (seed) {
    q = *seed;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (int ia = 1; ia <= 7; ++ia) {
      for (int ib = 1; ib <= 7; ++ib) {
        const Complex cand = (0.08 + (ia - 1) * 0.14) +
                             (0.08 + (ib - 1) * 0.14) * ctx.tau();
        const double d = std::abs(wp_jet(ctx, cand).wp - target);
        if (d < best) {
          best = d;
          q = cand;
        }
      }
    }
  }
  for (int it = 0; it < 80; ++it) {
    const WpJet j = wp_jet(ctx, q);
    if (std::abs(j.wp_prime) < 1e-12)
      throw RootSearchFailure("wp' vanished during the inversion");
    const Complex step = (j.wp - target) / j.wp_prime;
    q -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(q))) break;
  }
  if (std::abs(wp_jet(ctx, q).wp - target) > 1e-8 * std::max(1.0, std::abs(target)))
    throw RootSearchFailure("wp inversion did not converge");
  return q;
}

struct PviFrame {
  EllipticContext ctx;
  Complex e1, e2, e3;
};

PviFrame pvi_frame(Complex t, const CanonicalOptions& opt) {
  const Complex tau = opt.tau ? *opt.tau : pvi_tau_from_t(t, {}, opt.elliptic_n);
  EllipticContext ctx(tau, opt.elliptic_n);
  PviFrame fr{ctx, ctx.e()[0], ctx.e()[1], ctx.e()[2]};
  if (opt.tau) {
    const Complex tt = lambda_t(ctx);
    if (std::abs(tt - t) > 1e-6 * std::max(1.0, std::abs(t)))
      throw InvalidState("tau and t are inconsistent with t = (e3-e1)/(e2-e1)");
  }
  return fr;
}

// d/dtau of (wp(u; tau) - e1)/(e2 - e1) at fixed u, central difference
Complex f_tau_derivative(Complex u, Complex tau, int N, double h) {
  auto f = [&](Complex tt) {
    EllipticContext c(tt, N);
    return (wp_jet(c, u).wp - c.e()[0]) / (c.e()[1] - c.e()[0]);
  };
  return (f(tau + h) - f(tau - h)) / (2.0 * h);
}


}  // namespace

std::vector<Complex> first_derivative_weights(const std::vector<Complex>& nodes,
                                              Complex at) {
  const size_t m = nodes.size();
  std::vector<std::array<Complex, 2>> w(m, {Complex(0), Complex(0)});
  w[0][0] = 1.0;
  Complex c1 = 1.0;
  Complex c4 = nodes[0] - at;
  for (size_t i = 1; i < m; ++i) {
    Complex c2 = 1.0;
    const Complex c5 = c4;
    c4 = nodes[i] - at;
    for (size_t j = 0; j < i; ++j) {
      const Complex c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        w[i][1] = c1 * (w[i - 1][0] - c5 * w[i - 1][1]) / c2;
        w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
      }
      w[j][1] = (c4 * w[j][1] - w[j][0]) / c3;
      w[j][0] = c4 * w[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<Complex> out(m);
  for (size_t i = 0; i < m; ++i) out[i] = w[i][1];
  return out;
}

Complex pvi_tau_from_t(Complex t, std::optional<Complex> seed, int elliptic_n) {
  auto lam = [&](Complex tau) {
    return lambda_t(EllipticContext(tau, elliptic_n));
  };
  std::vector<Complex> seeds;
  if (seed) seeds.push_back(*seed);
  for (double re : {0.0, 0.5, 0.3, -0.5})
    for (double im : {1.0, 0.8, 1.3, 0.6, 1.8})
      seeds.emplace_back(re, im);
  const double hd = 1e-7;
  for (Complex tau : seeds) {
    bool ok = true;
    for (int it = 0; it < 60; ++it) {
      Complex f, d;
      try {
        f = lam(tau) - t;
        d = (lam(tau + hd) - lam(tau - hd)) / (2.0 * hd);
      } catch (const Error&) {
        ok = false;
        break;
      }
      if (std::abs(d) < 1e-14) { ok = false; break; }
      const Complex step = f / d;
      tau -= step;
      if (tau.imag() < 0.05) { ok = false; break; }
      if (std::abs(step) < 1e-13) break;
    }
    if (ok && tau.imag() > 0.05 &&
        std::abs(lam(tau) - t) <= 1e-10 * std::max(1.0, std::abs(t)))
      return tau;
  }
  throw RootSearchFailure("could not invert t = (e3-e1)/(e2-e1)");
}

std::array<Complex, 4> pvi_constants(const ParamSet& par, Eigen::Index n,
                                     Complex g) {
  const Complex g2 = g * g;
  return {0.5 * (par.k * par.k - 60.0 * g2 * static_cast<double>(n - 1)),
          0.5 * par.theta0 * par.theta0, 0.5 * par.theta1 * par.theta1,
          0.5 * (par.theta_t * par.theta_t + 1.0)};
}

PhysicalPoint map_to_physical(SystemId sys, const ParamSet& par,
                              const ParticleState& ps,
                              const CanonicalOptions& opt) {
  validate_particles(sys, ps);
  const Eigen::Index n = ps.n();
  PhysicalPoint out;
  out.q.resize(n);
  out.p.resize(n);
  const Complex t = ps.t;

  switch (sys) {
    case SystemId::PII:
    case SystemId::PI:
      out.q = ps.x;
      out.p = ps.y;
      out.T = t;
      return out;
    case SystemId::PIV: {
      const Complex th0 = par.theta0;
      for (Eigen::Index i = 0; i < n; ++i) {
        check_off_log_cut(ps.x[i], "PIV x");
        const Complex sx = std::sqrt(ps.x[i]);
        out.q[i] = 2.0 * sx;
        out.p[i] = sx * ps.y[i] - 0.5 * sx * (ps.x[i] + t - th0 / ps.x[i]);
      }
      out.T = t;
      return out;
    }
    case SystemId::PIII_D6:
    case SystemId::PIII_D7:
    case SystemId::PIII_D8: {
      check_off_log_cut(t, "PIII t");
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex x = ps.x[i];
        check_off_log_cut(x, "PIII x");
        out.q[i] = std::log(x);
        if (sys == SystemId::PIII_D6)
          out.p[i] = x * ps.y[i] - 0.5 * x + 0.5 * t / x +
                     0.5 * (par.theta1 - par.theta0);
        else if (sys == SystemId::PIII_D7)
          out.p[i] = x * ps.y[i] + 0.5 * t / x - 0.5 * par.theta;
        else
          out.p[i] = x * ps.y[i] + 0.5;
      }
      out.T = std::log(t);
      return out;
    }
    case SystemId::PV: {
      const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
      check_off_log_cut(t, "PV t");
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex x = ps.x[i];
        if (std::abs(x) < kCutTol || std::abs(x - 1.0) < kCutTol)
          throw BranchDomain("PV x at 0 or 1");
        const Complex Q = x / (x - 1.0);
        const Complex Pb = -(ps.y[i] + (th0 + th1) * (Q - 1.0)) / ((Q - 1.0) * (Q - 1.0));
        check_off_log_cut(Q, "PV Q");
        const Complex w = std::sqrt(Q);
        const Complex arg = -1.0 / w;
        if (std::abs(arg.imag()) < kCutTol && std::abs(arg.real()) >= 1.0 - kCutTol)
          throw BranchDomain("PV atanh argument on the cut");
        out.q[i] = 2.0 * std::atanh(arg);
        out.p[i] = w * (Q - 1.0) *
                   (Pb - 0.5 * (th2 / Q - (th0 + 2.0 * th1 + th2) / (Q - 1.0) +
                                t / ((Q - 1.0) * (Q - 1.0))));
      }
      out.T = std::log(t);
      return out;
    }
    case SystemId::PVI: {
      const PviFrame fr = pvi_frame(t, opt);
      const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t;
      const Complex d21 = fr.e2 - fr.e1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex target = fr.e1 + d21 * ps.x[i];
        std::optional<Complex> seed;
        if (opt.pvi_q_seed && opt.pvi_q_seed->size() == n) seed = (*opt.pvi_q_seed)[i];
        const Complex q = wp_invert(fr.ctx, target, seed);
        const WpJet j = wp_jet(fr.ctx, q);
        if (std::abs(j.wp_prime) < 1e-10)
          throw BranchDomain("PVI x at a branch point (wp' = 0)");
        const Complex ft =
            f_tau_derivative(q, fr.ctx.tau(), opt.elliptic_n, opt.fd_tau_step);
        out.q[i] = q;
        out.p[i] = (ps.y[i] -
                    2.0 * kI * kPi * d21 * d21 / (j.wp_prime * j.wp_prime) * ft -
                    0.5 * d21 * (th0 / (j.wp - fr.e1) + th1 / (j.wp - fr.e2) +
                                 tht / (j.wp - fr.e3))) *
                   j.wp_prime / d21;
      }
      out.T = fr.ctx.tau();
      return out;
    }
  }
  throw ConfigError("unreachable system");
}

ParticleState map_from_physical(SystemId sys, const ParamSet& par,
                                const PhysicalPoint& ph, Complex g,
                                const CanonicalOptions& opt) {
  const Eigen::Index n = ph.q.size();
  ParticleState ps;
  ps.x.resize(n);
  ps.y.resize(n);
  ps.g = g;

  switch (sys) {
    case SystemId::PII:
    case SystemId::PI:
      ps.x = ph.q;
      ps.y = ph.p;
      ps.t = ph.T;
      return ps;
    case SystemId::PIV: {
      const Complex t = ph.T, th0 = par.theta0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex sx = 0.5 * ph.q[i];
        if (std::abs(sx) < kCutTol) throw BranchDomain("PIV q at 0");
        const Complex x = sx * sx;
        ps.x[i] = x;
        ps.y[i] = (ph.p[i] + 0.5 * sx * (x + t - th0 / x)) / sx;
      }
      ps.t = t;
      return ps;
    }
    case SystemId::PIII_D6:
    case SystemId::PIII_D7:
    case SystemId::PIII_D8: {
      const Complex t = std::exp(ph.T);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex x = std::exp(ph.q[i]);
        ps.x[i] = x;
        if (sys == SystemId::PIII_D6)
          ps.y[i] = (ph.p[i] + 0.5 * x - 0.5 * t / x -
                     0.5 * (par.theta1 - par.theta0)) / x;
        else if (sys == SystemId::PIII_D7)
          ps.y[i] = (ph.p[i] - 0.5 * t / x + 0.5 * par.theta) / x;
        else
          ps.y[i] = (ph.p[i] - 0.5) / x;
      }
      ps.t = t;
      return ps;
    }
    case SystemId::PV: {
      const Complex t = std::exp(ph.T);
      const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex th = std::tanh(0.5 * ph.q[i]);
        if (std::abs(th) < kCutTol) throw BranchDomain("PV coth pole");
        const Complex w = -1.0 / th;  // sqrt(Q) on the map's branch
        const Complex Q = w * w;
        const Complex Pb =
            ph.p[i] / (w * (Q - 1.0)) +
            0.5 * (th2 / Q - (th0 + 2.0 * th1 + th2) / (Q - 1.0) +
                   t / ((Q - 1.0) * (Q - 1.0)));
        ps.x[i] = Q / (Q - 1.0);
        ps.y[i] = -(Q - 1.0) * (Q - 1.0) * Pb - (th0 + th1) * (Q - 1.0);
      }
      ps.t = t;
      return ps;
    }
    case SystemId::PVI: {
      const Complex tau = ph.T;
      EllipticContext ctx(tau, opt.elliptic_n);
      const Complex e1 = ctx.e()[0], e2 = ctx.e()[1], e3 = ctx.e()[2];
      const Complex d21 = e2 - e1;
      const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t;
      for (Eigen::Index i = 0; i < n; ++i) {
        const WpJet j = wp_jet(ctx, ph.q[i]);
        const Complex ft =
            f_tau_derivative(ph.q[i], tau, opt.elliptic_n, opt.fd_tau_step);
        ps.x[i] = (j.wp - e1) / d21;
        ps.y[i] = d21 / j.wp_prime * ph.p[i] +
                  2.0 * kI * kPi * d21 * d21 / (j.wp_prime * j.wp_prime) * ft +
                  0.5 * d21 * (th0 / (j.wp - e1) + th1 / (j.wp - e2) +
                               tht / (j.wp - e3));
      }
      ps.t = lambda_t(ctx);
      return ps;
    }
  }
  throw ConfigError("unreachable system");
}

double symplectic_residual(SystemId sys, const ParamSet& par,
                           const ParticleState& ps, double h,
                           const CanonicalOptions& opt) {
  validate_particles(sys, ps);
  CanonicalOptions local = opt;
  if (sys == SystemId::PVI && !local.tau)
    local.tau = pvi_tau_from_t(ps.t, {}, opt.elliptic_n);
  const PhysicalPoint base = map_to_physical(sys, par, ps, local);
  if (sys == SystemId::PVI) local.pvi_q_seed = base.q;  // keep one branch under FD

  auto mapped = [&](Eigen::Index j, Complex dx, Complex dy) {
    ParticleState s = ps;
    s.x[j] += dx;
    s.y[j] += dy;
    const PhysicalPoint ph = map_to_physical(sys, par, s, local);
    return std::pair<Complex, Complex>(ph.q[j], ph.p[j]);
  };

  double worst = 0.0;
  for (Eigen::Index j = 0; j < ps.n(); ++j) {
    const auto [qxp, pxp] = mapped(j, h, 0);
    const auto [qxm, pxm] = mapped(j, -h, 0);
    const auto [qyp, pyp] = mapped(j, 0, h);
    const auto [qym, pym] = mapped(j, 0, -h);
    const Complex dqdx = (qxp - qxm) / (2.0 * h), dpdx = (pxp - pxm) / (2.0 * h);
    const Complex dqdy = (qyp - qym) / (2.0 * h), dpdy = (pyp - pym) / (2.0 * h);
    worst = std::max(worst, std::abs(dqdx * dpdy - dqdy * dpdx - 1.0));
  }
  return worst;
}

namespace {

// physical Hamilton fields (dq/dT, dp/dT) in the catalog normalization
std::pair<CVec, CVec> physical_fields(SystemId sys, const ParamSet& par,
                                      const CVec& q, const CVec& p, Complex T,
                                      Complex g, const CanonicalOptions& opt) {
  const Eigen::Index n = q.size();
  CVec fq(n), fp(n);
  const Complex g2 = g * g;

  auto sinh_coupling = [&](Eigen::Index j) {
    // -(g^2/2) d/dq_j sum_{j<k} sinh^-2((q_j - q_k)/2)
    Complex acc = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const Complex u = 0.5 * (q[j] - q[k]);
      const Complex sh = std::sinh(u);
      acc += 0.5 * g2 * std::cosh(u) / (sh * sh * sh);
    }
    return acc;
  };

  switch (sys) {
    case SystemId::PII:
    case SystemId::PI: {
      ParticleState ps;
      ps.x = q;
      ps.y = p;
      ps.t = T;
      ps.g = g;
      return particle_flow_fields(sys, par, ps);
    }
    case SystemId::PIV: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      for (Eigen::Index j = 0; j < n; ++j) {
        fq[j] = 2.0 * p[j];
        const Complex qq = q[j];
        fp[j] = 6.0 * qq * qq * qq * qq * qq / 256.0 + 4.0 * T * qq * qq * qq / 32.0 +
                0.5 * (th1 + 0.5 * th0 + 0.25 * T * T - 0.5) * qq -
                2.0 * th0 * th0 / (qq * qq * qq);
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == j) continue;
          const Complex dm = q[j] - q[k], dp_ = q[j] + q[k];
          fp[j] += 16.0 * g2 * (1.0 / (dm * dm * dm) + 1.0 / (dp_ * dp_ * dp_));
        }
      }
      return {fq, fp};
    }
    case SystemId::PV: {
      const Complex c1 = par.theta0 + 2.0 * par.theta1 + par.theta2 + 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        fq[j] = 2.0 * p[j];
        const Complex qq = q[j];
        const Complex sh = std::sinh(0.5 * qq), ch = std::cosh(0.5 * qq);
        fp[j] = std::exp(2.0 * T) * std::sinh(2.0 * qq) / 16.0 -
                0.25 * std::exp(T) * c1 * std::sinh(qq) -
                0.25 * par.theta0 * par.theta0 * ch / (sh * sh * sh) +
                0.25 * par.theta2 * par.theta2 * sh / (ch * ch * ch);
        // coupling as printed: (g^2/2) sum 1/sinh((qj -+ qk)/2)
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == j) continue;
          const Complex um = 0.5 * (q[j] - q[k]), up = 0.5 * (q[j] + q[k]);
          const Complex shm = std::sinh(um), shp = std::sinh(up);
          fp[j] += 0.25 * g2 *
                   (std::cosh(um) / (shm * shm) + std::cosh(up) / (shp * shp));
        }
      }
      return {fq, fp};
    }
    case SystemId::PIII_D6: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      for (Eigen::Index j = 0; j < n; ++j) {
        fq[j] = 2.0 * p[j];
        const Complex eq = std::exp(q[j]), emq = std::exp(T - q[j]);
        fp[j] = 0.5 * (eq * eq - emq * emq) + 0.5 * (th1 + th0) * eq +
                0.5 * (th0 - th1 - 1.0) * emq;
        fp[j] += sinh_coupling(j);
      }
      return {fq, fp};
    }
    case SystemId::PIII_D7: {
      for (Eigen::Index j = 0; j < n; ++j) {
        fq[j] = 2.0 * p[j];
        const Complex eq = std::exp(q[j]), emq = std::exp(T - q[j]);
        fp[j] = -eq + 0.5 * (par.theta - 1.0) * emq - 0.5 * emq * emq;
        fp[j] += sinh_coupling(j);
      }
      return {fq, fp};
    }
    case SystemId::PIII_D8: {
      for (Eigen::Index j = 0; j < n; ++j) {
        fq[j] = 2.0 * p[j];
        fp[j] = std::exp(q[j]) - std::exp(T - q[j]);
        fp[j] += sinh_coupling(j);
      }
      return {fq, fp};
    }
    case SystemId::PVI: {
      const std::array<Complex, 4> gl = pvi_constants(par, n, g);
      EllipticContext ctx(T, opt.elliptic_n);
      const std::array<Complex, 4>& om = ctx.omegas();
      const Complex tp = 2.0 * kI * kPi;
      for (Eigen::Index j = 0; j < n; ++j) {
        fq[j] = p[j] / tp;
        Complex s = 0;
        for (int l = 0; l < 4; ++l)
          s += gl[static_cast<size_t>(l)] *
               wp_jet(ctx, q[j] + om[static_cast<size_t>(l)]).wp_prime;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == j) continue;
          s -= 16.0 * g2 * (wp_jet(ctx, q[j] - q[k]).wp_prime +
                            wp_jet(ctx, q[j] + q[k]).wp_prime);
        }
        fp[j] = s / tp;
      }
      return {fq, fp};
    }
  }
  throw ConfigError("unreachable system");
}

}  // namespace

double pushforward_dynamics_residual(SystemId sys, const ParamSet& par,
                                     const std::vector<ParticleState>& traj,
                                     const CanonicalOptions& opt) {
  if (traj.size() < 5) throw GridMismatch("need at least 5 samples");
  const Eigen::Index n = traj.front().n();
  const Complex g = traj.front().g;

  std::vector<PhysicalPoint> mapped;
  mapped.reserve(traj.size());
  CanonicalOptions local = opt;
  for (const ParticleState& ps : traj) {
    if (sys == SystemId::PVI) {
      local.tau = pvi_tau_from_t(
          ps.t, mapped.empty() ? opt.tau : std::optional<Complex>(mapped.back().T),
          opt.elliptic_n);
    }
    PhysicalPoint ph = map_to_physical(sys, par, ps, local);
    if (sys == SystemId::PVI) local.pvi_q_seed = ph.q;  // track one branch
    mapped.push_back(std::move(ph));
  }

  // five-node differentiation window; interior points only
  const size_t half = 2;
  double worst = 0.0;
  for (size_t i = half; i + half < mapped.size(); ++i) {
    std::vector<Complex> nodes(2 * half + 1);
    for (size_t k = 0; k < nodes.size(); ++k) {
      nodes[k] = mapped[i - half + k].T;
      if (k > 0 && std::abs(nodes[k] - nodes[k - 1]) < 1e-14)
        throw GridMismatch("degenerate time grid");
    }
    const std::vector<Complex> wgt = first_derivative_weights(nodes, mapped[i].T);
    CVec dq = CVec::Zero(n), dp = CVec::Zero(n);
    for (size_t k = 0; k < nodes.size(); ++k) {
      dq += wgt[k] * mapped[i - half + k].q;
      dp += wgt[k] * mapped[i - half + k].p;
    }
    const auto [fq, fp] =
        physical_fields(sys, par, mapped[i].q, mapped[i].p, mapped[i].T, g, opt);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double den = std::max({1.0, std::abs(fq[j]), std::abs(fp[j])});
      worst = std::max({worst, std::abs(dq[j] - fq[j]) / den,
                        std::abs(dp[j] - fp[j]) / den});
    }
  }
  return worst;
}

}  // namespace cplab
