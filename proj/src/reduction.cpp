#include "cplab/reduction.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cplab/matcore.hpp"

namespace cplab {

void validate_particles(SystemId sys, const ParticleState& ps, double sep_min) {
  if (ps.x.size() < 1 || ps.x.size() != ps.y.size())
    throw InvalidState("particle vectors must be nonempty and of equal size");
  if (!ps.x.allFinite() || !ps.y.allFinite() || !is_finite(ps.t))
    throw NonFiniteInput("particle state");
  if (min_pairwise_separation(ps.x) < sep_min)
    throw ParticleCollision("min separation below " + std::to_string(sep_min));
  for (Complex bad : forbidden_times(sys))
    if (std::abs(ps.t - bad) < kTimeFloor)
      throw ForbiddenTime(to_string(sys) + " at singular time");
  const bool x_pole_at_0 = sys == SystemId::PV || sys == SystemId::PVI ||
                           sys == SystemId::PIII_D6 || sys == SystemId::PIII_D7 ||
                           sys == SystemId::PIII_D8;
  for (Eigen::Index i = 0; i < ps.n(); ++i) {
    if (x_pole_at_0 && std::abs(ps.x[i]) < kTimeFloor)
      throw InvalidState("x_j at a pole of the reduced Hamiltonian");
    if (sys == SystemId::PVI &&
        (std::abs(ps.x[i] - 1.0) < kTimeFloor || std::abs(ps.x[i] - ps.t) < kTimeFloor))
      throw InvalidState("PVI x_j at 1 or t");
  }
}

std::pair<CMat, CMat> orbit_embed(const ParticleState& ps) {
  const Eigen::Index n = ps.n();
  if (min_pairwise_separation(ps.x) < kSepMinDefault)
    throw ParticleCollision("orbit_embed");
  CMat X = ps.x.asDiagonal();
  CMat Y = ps.y.asDiagonal();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (j != k) Y(j, k) = kI * ps.g / (ps.x[j] - ps.x[k]);
  return {X, Y};
}

OrbitFrame kks_normalize(const CMat& q, const CMat& p, Complex g, double sep_min) {
  if (q.rows() != q.cols() || p.rows() != p.cols() || q.rows() != p.rows())
    throw DimensionMismatch("kks_normalize");
  const Eigen::Index n = q.rows();
  const CMat comm = commutator(p, q);
  const CMat ones = CMat::Ones(n, n);
  const CMat orbit_rhs = kI * g * (CMat::Identity(n, n) - ones);
  const double scale = std::max(1.0, std::abs(g));

  const EigDecomp ed = eig_diagonalize(q, sep_min);
  CVec alpha;
  if (std::abs(g) < 1e-14) {
    if (comm.norm() > 1e-8 * scale)
      throw OffOrbit("[p,q] != 0 with g = 0");
    alpha = CVec::Ones(n);
  } else {
    // rank-one factor of 1 - [p,q]/(ig); conjugation-invariant orbit test.
    const CMat M = CMat::Identity(n, n) - comm / (kI * g);
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s1 = svd.singularValues()(0);
    const double s2 = n > 1 ? svd.singularValues()(1) : 0.0;
    const bool literal = (comm - orbit_rhs).norm() <= 1e-8 * scale;
    if (!literal && s2 > 1e-6 * std::max(1.0, s1))
      throw OffOrbit("1 - [p,q]/(ig) is not rank one");
    const CVec col = s1 * svd.matrixU().col(0);
    const Eigen::RowVectorXcd row = svd.matrixV().col(0).adjoint();
    alpha = ed.V.partialPivLu().solve(col);
    const Eigen::RowVectorXcd beta = row * ed.V;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(alpha[j]) < 1e-12 || std::abs(beta[j]) < 1e-12)
        throw DegenerateScaling("vanishing scaling component at j=" + std::to_string(j));
      if (std::abs(alpha[j] * beta[j] - 1.0) > 1e-6)
        throw OffOrbit("rank-one factor incompatible with the orbit");
    }
  }

  CMat C = ed.V * alpha.asDiagonal();
  // det C = 1 (principal n-th root; conjugation is scalar-invariant)
  const Complex det = C.partialPivLu().determinant();
  if (std::abs(det) < 1e-300) throw DegenerateScaling("singular frame");
  C *= std::exp(-std::log(det) / static_cast<double>(n));

  OrbitFrame fr;
  fr.C = C;
  fr.g = g;
  fr.X = ed.lambda.asDiagonal();
  fr.Y = C.partialPivLu().solve(p * C);
  // enforce the frame law before handing the frame out
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (j != k) {
        const Complex want = kI * g / (ed.lambda[j] - ed.lambda[k]);
        if (std::abs(fr.Y(j, k) - want) > 1e-6 * std::max(1.0, std::abs(want)))
          throw OffOrbit("normalized Y violates the off-diagonal law");
      }
  return fr;
}

FMatrix f_matrix(SystemId sys, const ParamSet&, const CVec& x, Complex t,
                 Complex g) {
  const Eigen::Index n = x.size();
  if (min_pairwise_separation(x) < kSepMinDefault)
    throw ParticleCollision("f_matrix");
  for (Complex bad : forbidden_times(sys))
    if (std::abs(t - bad) < kTimeFloor) throw ForbiddenTime("f_matrix");

  FMatrix out;
  out.F = CMat::Zero(n, n);
  const Complex ig = kI * g;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Complex xi = x[i], xj = x[j];
      const Complex d2 = (xi - xj) * (xi - xj);
      Complex v;
      switch (sys) {
        case SystemId::PVI:
          v = ig / (t * (t - 1.0)) *
              (((t - xi) * xi * (xi - 1.0) + (t - xj) * xj * (xj - 1.0)) / d2 +
               xi + xj - 1.0);
          break;
        case SystemId::PV:
          v = -ig / t * (xi * xi + xj * xj - xi - xj) / d2;
          break;
        case SystemId::PIV:
          v = -ig * (xi + xj) / d2;
          break;
        case SystemId::PIII_D6:
          v = -ig / t * (xi * xi + xj * xj) / d2;
          break;
        case SystemId::PIII_D7:
        case SystemId::PIII_D8:
          v = -2.0 * ig / t * (xi * xj) / d2;
          break;
        case SystemId::PII:
        case SystemId::PI:
          v = -ig / d2;
          break;
      }
      out.F(i, j) = v;
    }
  }
  out.K = out.F.sum() / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j)
    out.F(j, j) = -(out.F.row(j).sum() - out.F(j, j)) + out.K;
  return out;
}

Complex reduced_hamiltonian(SystemId sys, const ParamSet& par,
                            const ParticleState& ps) {
  validate_particles(sys, ps);
  const Eigen::Index n = ps.n();
  const Complex t = ps.t, g2 = ps.g * ps.g;
  const CVec& x = ps.x;
  const CVec& y = ps.y;
  Complex s = 0;

  auto pair_sum = [&](auto f) {
    Complex acc = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) acc += f(x[j], x[k]);
    return acc;
  };

  switch (sys) {
    case SystemId::PVI: {
      const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t,
                    k = par.k, th = par.theta;
      for (Eigen::Index i = 0; i < n; ++i)
        s += x[i] * (x[i] - 1.0) * (x[i] - t) * y[i] * y[i] -
             (tht * x[i] * (x[i] - 1.0) + th1 * x[i] * (x[i] - t) +
              th0 * (x[i] - 1.0) * (x[i] - t)) * y[i] +
             0.25 * (th * th - k * k) * x[i];
      s += g2 * pair_sum([&](Complex a, Complex b) {
        return (a * (a - 1.0) * (a - t) + b * (b - 1.0) * (b - t)) /
                   ((a - b) * (a - b)) - a - b;
      });
      return s / (t * (t - 1.0));
    }
    case SystemId::PV: {
      const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
      for (Eigen::Index i = 0; i < n; ++i)
        s += (x[i] * x[i] - x[i]) / t * y[i] * y[i] +
             (x[i] * x[i] + ((th0 - th2 - t) * x[i] + th2) / t) * y[i] +
             (th0 + th1) * x[i];
      s += g2 / t * pair_sum([&](Complex a, Complex b) {
        return (2.0 * a * b - a - b) / ((a - b) * (a - b));
      });
      return s;
    }
    case SystemId::PIV: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      for (Eigen::Index i = 0; i < n; ++i)
        s += x[i] * y[i] * y[i] - (x[i] * x[i] + t * x[i] - th0) * y[i] -
             (th0 + th1) * x[i];
      s += g2 * pair_sum([&](Complex a, Complex b) {
        return (a + b) / ((a - b) * (a - b));
      });
      return s;
    }
    case SystemId::PIII_D6: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      for (Eigen::Index i = 0; i < n; ++i)
        s += (x[i] * x[i] * y[i] * y[i] +
              (-x[i] * x[i] + (th1 - th0) * x[i] + t) * y[i] - th1 * x[i]) / t;
      s += 2.0 * g2 / t * pair_sum([&](Complex a, Complex b) {
        return a * b / ((a - b) * (a - b));
      });
      return s;
    }
    case SystemId::PIII_D7: {
      const Complex th = par.theta;
      for (Eigen::Index i = 0; i < n; ++i)
        s += (x[i] * x[i] * y[i] * y[i] + (t - th * x[i]) * y[i] + x[i]) / t;
      s += 2.0 * g2 / t * pair_sum([&](Complex a, Complex b) {
        return a * b / ((a - b) * (a - b));
      });
      return s;
    }
    case SystemId::PIII_D8: {
      for (Eigen::Index i = 0; i < n; ++i)
        s += x[i] * x[i] * y[i] * y[i] / t + (x[i] * y[i] - x[i] - t / x[i]) / t;
      s += 2.0 * g2 / t * pair_sum([&](Complex a, Complex b) {
        return a * b / ((a - b) * (a - b));
      });
      return s;
    }
    case SystemId::PII: {
      const Complex th = par.theta;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex u = x[i] * x[i] + 0.5 * t;
        s += 0.5 * y[i] * y[i] - 0.5 * u * u - th * x[i];
      }
      s += g2 * pair_sum([&](Complex a, Complex b) {
        return 1.0 / ((a - b) * (a - b));
      });
      return s;
    }
    case SystemId::PI: {
      for (Eigen::Index i = 0; i < n; ++i)
        s += 0.5 * y[i] * y[i] - 0.5 * x[i] * x[i] * x[i] - 0.25 * t * x[i];
      s += g2 * pair_sum([&](Complex a, Complex b) {
        return 1.0 / ((a - b) * (a - b));
      });
      return s;
    }
  }
  throw ConfigError("unreachable system");
}

std::pair<CVec, CVec> particle_flow_fields(SystemId sys, const ParamSet& par,
                                           const ParticleState& ps) {
  validate_particles(sys, ps);
  const Eigen::Index n = ps.n();
  const Complex t = ps.t, g2 = ps.g * ps.g;
  const CVec& x = ps.x;
  const CVec& y = ps.y;
  CVec dx(n), dy(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex xi = x[i], yi = y[i];
    switch (sys) {
      case SystemId::PVI: {
        const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t,
                      k = par.k, th = par.theta;
        const Complex pref = t * (t - 1.0);
        const Complex P = xi * (xi - 1.0) * (xi - t);
        const Complex Pp = 3.0 * xi * xi - 2.0 * (1.0 + t) * xi + t;
        dx[i] = (2.0 * P * yi -
                 (tht * xi * (xi - 1.0) + th1 * xi * (xi - t) +
                  th0 * (xi - 1.0) * (xi - t))) / pref;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          const Complex Pk = x[kk] * (x[kk] - 1.0) * (x[kk] - t);
          dcoup += Pp / (d * d) - 2.0 * (P + Pk) / (d * d * d) - 1.0;
        }
        dy[i] = -(Pp * yi * yi -
                  (tht * (2.0 * xi - 1.0) + th1 * (2.0 * xi - t) +
                   th0 * (2.0 * xi - 1.0 - t)) * yi +
                  0.25 * (th * th - k * k) + g2 * dcoup) / pref;
        break;
      }
      case SystemId::PV: {
        const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
        dx[i] = 2.0 * (xi * xi - xi) / t * yi + xi * xi +
                ((th0 - th2 - t) * xi + th2) / t;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk], xk = x[kk];
          dcoup += (xi + 3.0 * xk - 2.0 * xk * (xi + xk)) / (d * d * d);
        }
        dy[i] = -((2.0 * xi - 1.0) / t * yi * yi +
                  (2.0 * xi + (th0 - th2 - t) / t) * yi + (th0 + th1) +
                  g2 / t * dcoup);
        break;
      }
      case SystemId::PIV: {
        const Complex th0 = par.theta0, th1 = par.theta1;
        dx[i] = 2.0 * xi * yi - (xi * xi + t * xi - th0);
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          dcoup += (xi + 3.0 * x[kk]) / (d * d * d);
        }
        dy[i] = -yi * yi + (2.0 * xi + t) * yi + (th0 + th1) + g2 * dcoup;
        break;
      }
      case SystemId::PIII_D6: {
        const Complex th0 = par.theta0, th1 = par.theta1;
        dx[i] = (2.0 * xi * xi * yi - xi * xi + (th1 - th0) * xi + t) / t;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          dcoup += x[kk] * (xi + x[kk]) / (d * d * d);
        }
        dy[i] = -(2.0 * xi * yi * yi + (th1 - th0 - 2.0 * xi) * yi - th1) / t +
                2.0 * g2 / t * dcoup;
        break;
      }
      case SystemId::PIII_D7: {
        const Complex th = par.theta;
        dx[i] = (2.0 * xi * xi * yi + t - th * xi) / t;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          dcoup += x[kk] * (xi + x[kk]) / (d * d * d);
        }
        dy[i] = -(2.0 * xi * yi * yi - th * yi + 1.0) / t + 2.0 * g2 / t * dcoup;
        break;
      }
      case SystemId::PIII_D8: {
        dx[i] = (2.0 * xi * xi * yi + xi) / t;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          dcoup += x[kk] * (xi + x[kk]) / (d * d * d);
        }
        dy[i] = -(2.0 * xi * yi * yi + yi - 1.0 + t / (xi * xi)) / t +
                2.0 * g2 / t * dcoup;
        break;
      }
      case SystemId::PII: {
        dx[i] = yi;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          dcoup += 2.0 / (d * d * d);
        }
        dy[i] = 2.0 * xi * xi * xi + t * xi + par.theta + g2 * dcoup;
        break;
      }
      case SystemId::PI: {
        dx[i] = yi;
        Complex dcoup = 0;
        for (Eigen::Index kk = 0; kk < n; ++kk) {
          if (kk == i) continue;
          const Complex d = xi - x[kk];
          dcoup += 2.0 / (d * d * d);
        }
        dy[i] = 1.5 * xi * xi + 0.25 * t + g2 * dcoup;
        break;
      }
    }
  }
  return {dx, dy};
}

std::vector<ParticleState> integrate_particle_flow(SystemId sys,
                                                   const ParamSet& par,
                                                   const ParticleState& ps0,
                                                   Complex t1, double tol,
                                                   long max_steps,
                                                   const IntegrateOptions& opt) {
  validate_particles(sys, ps0);
  const Eigen::Index n = ps0.n();
  const double length = std::abs(t1 - ps0.t);
  const Complex dir = length > 0 ? (t1 - ps0.t) / length : Complex(1);

  auto f = [&](double s, const CVec& v) -> CVec {
    ParticleState ps;
    ps.x = v.head(n);
    ps.y = v.tail(n);
    ps.t = ps0.t + s * dir;
    ps.g = ps0.g;
    auto [dx, dy] = particle_flow_fields(sys, par, ps);
    CVec dv(2 * n);
    dv.head(n) = dir * dx;
    dv.tail(n) = dir * dy;
    return dv;
  };

  const int m = std::max(2, opt.n_samples);
  std::vector<double> grid(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) grid[static_cast<size_t>(i)] = length * i / (m - 1);
  CVec v0(2 * n);
  v0.head(n) = ps0.x;
  v0.tail(n) = ps0.y;

  const std::vector<CVec> ys = detail::rk45(f, v0, length, grid, tol,
                                            max_steps > 0 ? max_steps : opt.max_steps);
  std::vector<ParticleState> out;
  out.reserve(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) {
    ParticleState ps;
    ps.x = ys[i].head(n);
    ps.y = ys[i].tail(n);
    ps.t = ps0.t + grid[i] * dir;
    ps.g = ps0.g;
    validate_particles(sys, ps);
    out.push_back(std::move(ps));
  }
  return out;
}

namespace {

// exact min-sum assignment by permutation enumeration (n <= 8 in practice)
std::vector<Eigen::Index> match_permutation(const CVec& from, const CVec& to) {
  const Eigen::Index n = from.size();
  std::vector<Eigen::Index> perm(static_cast<size_t>(n)), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      cost += std::abs(from[perm[static_cast<size_t>(i)]] - to[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

double spectral_match(const Trajectory& tr, const std::vector<ParticleState>& pr) {
  if (tr.samples.size() != pr.size() || pr.empty())
    throw GridMismatch("sample counts differ");
  for (size_t i = 0; i < pr.size(); ++i)
    if (std::abs(tr.samples[i].t - pr[i].t) >
        1e-9 * std::max(1.0, std::abs(pr[i].t)))
      throw GridMismatch("time grids differ at sample " + std::to_string(i));

  const Eigen::Index n = tr.samples.front().n();
  if (pr.front().n() != n) throw GridMismatch("particle count != matrix size");

  double worst = 0.0;
  CVec ref = pr.front().x;
  for (size_t s = 0; s < pr.size(); ++s) {
    Eigen::ComplexEigenSolver<CMat> es(tr.samples[s].q, false);
    if (es.info() != Eigen::Success) throw NonConvergence("eigenvalues");
    const CVec lam = es.eigenvalues();
    const std::vector<Eigen::Index> perm = match_permutation(lam, ref);
    CVec matched(n);
    for (Eigen::Index i = 0; i < n; ++i) matched[i] = lam[perm[static_cast<size_t>(i)]];
    for (Eigen::Index i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(matched[i] - pr[s].x[i]));
    ref = matched;
  }
  return worst;
}

}  // namespace cplab
