#include "cplab/syscat.hpp"

#include <Eigen/SVD>

#include "cplab/flows.hpp"
#include "cplab/matcore.hpp"

namespace cplab {

std::string to_string(SystemId sys) {
  switch (sys) {
    case SystemId::PVI: return "PVI";
    case SystemId::PV: return "PV";
    case SystemId::PIV: return "PIV";
    case SystemId::PIII_D6: return "PIII_D6";
    case SystemId::PIII_D7: return "PIII_D7";
    case SystemId::PIII_D8: return "PIII_D8";
    case SystemId::PII: return "PII";
    case SystemId::PI: return "PI";
  }
  throw ConfigError("unreachable SystemId");
}

SystemId system_from_string(const std::string& name) {
  for (SystemId s : kAllSystems)
    if (to_string(s) == name) return s;
  throw ConfigError("unknown system '" + name + "'");
}

ParamSet ParamSet::pvi(Complex theta0, Complex theta1, Complex theta_t, Complex k) {
  ParamSet p;
  p.theta0 = theta0;
  p.theta1 = theta1;
  p.theta_t = theta_t;
  p.k = k;
  p.theta = theta0 + theta_t + theta1;
  return p;
}

ParamSet ParamSet::pvi_checked(Complex theta0, Complex theta1, Complex theta_t,
                               Complex k, Complex theta) {
  const Complex sum = theta0 + theta_t + theta1;
  if (std::abs(theta - sum) > 1e-12 * std::max(1.0, std::abs(sum)))
    throw InvalidState("PVI requires theta = theta0 + theta_t + theta1");
  return pvi(theta0, theta1, theta_t, k);
}

ParamSet ParamSet::pv(Complex theta0, Complex theta1, Complex theta2) {
  ParamSet p;
  p.theta0 = theta0;
  p.theta1 = theta1;
  p.theta2 = theta2;
  return p;
}

ParamSet ParamSet::piv(Complex theta0, Complex theta1) {
  ParamSet p;
  p.theta0 = theta0;
  p.theta1 = theta1;
  return p;
}

ParamSet ParamSet::piii_d6(Complex theta0, Complex theta1) { return piv(theta0, theta1); }

ParamSet ParamSet::piii_d7(Complex theta) {
  ParamSet p;
  p.theta = theta;
  return p;
}

ParamSet ParamSet::piii_d8() { return ParamSet{}; }

ParamSet ParamSet::pii(Complex theta) { return piii_d7(theta); }

ParamSet ParamSet::pi() { return ParamSet{}; }

std::vector<Complex> forbidden_times(SystemId sys) {
  switch (sys) {
    case SystemId::PVI: return {Complex(0), Complex(1)};
    case SystemId::PV:
    case SystemId::PIII_D6:
    case SystemId::PIII_D7:
    case SystemId::PIII_D8: return {Complex(0)};
    default: return {};
  }
}

std::pair<Complex, Complex> default_window(SystemId sys) {
  switch (sys) {
    case SystemId::PVI: return {Complex(0.3), Complex(0.4)};
    case SystemId::PV:
    case SystemId::PIII_D6:
    case SystemId::PIII_D7:
    case SystemId::PIII_D8: return {Complex(1), Complex(2)};
    default: return {Complex(0), Complex(1)};
  }
}

void validate_state(SystemId sys, const MatrixState& st) {
  if (st.q.rows() != st.q.cols() || st.p.rows() != st.p.cols() ||
      st.q.rows() != st.p.rows() || st.q.rows() < 1)
    throw InvalidState("q, p must be square and of equal size");
  require_finite(st.q, "state q");
  require_finite(st.p, "state p");
  if (!is_finite(st.t)) throw InvalidState("non-finite t");
  for (Complex bad : forbidden_times(sys))
    if (std::abs(st.t - bad) < kTimeFloor)
      throw InvalidState(to_string(sys) + " state at singular time");
  if (sys == SystemId::PIII_D8) {
    Eigen::JacobiSVD<CMat> svd(st.q);
    if (svd.singularValues()(st.q.rows() - 1) < kInvertibilityFloor)
      throw InvalidState("PIII_D8 requires q invertible (smallest singular value below floor)");
  }
}

namespace {

CMat eye(Eigen::Index n) { return CMat::Identity(n, n); }

CMat blocks(const CMat& a11, const CMat& a12, const CMat& a21, const CMat& a22) {
  const Eigen::Index n = a11.rows();
  CMat m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a11;
  m.topRightCorner(n, n) = a12;
  m.bottomLeftCorner(n, n) = a21;
  m.bottomRightCorner(n, n) = a22;
  return m;
}

}  // namespace

std::vector<Complex> spectral_poles(SystemId sys, const MatrixState& st) {
  switch (sys) {
    case SystemId::PVI: return {Complex(0), Complex(1), st.t};
    case SystemId::PV: return {Complex(0), Complex(1)};
    case SystemId::PIII_D6: return {Complex(0), Complex(1)};
    case SystemId::PIV:
    case SystemId::PIII_D7:
    case SystemId::PIII_D8:
    case SystemId::PII: return {Complex(0)};
    case SystemId::PI: return {};
  }
  return {};
}

LaxValue lax_pair_eval(SystemId sys, const ParamSet& par, const MatrixState& st,
                       Complex z) {
  validate_state(sys, st);
  for (Complex pole : spectral_poles(sys, st))
    if (std::abs(z - pole) < 1e-10 * std::max(1.0, std::abs(pole)))
      throw SingularSpectralPoint("z at pole " + std::to_string(pole.real()));

  const Eigen::Index n = st.n();
  const CMat& q = st.q;
  const CMat& p = st.p;
  const Complex t = st.t;
  const CMat I = eye(n);
  const CMat Z = CMat::Zero(n, n);
  LaxValue out;
  out.z = z;

  switch (sys) {
    case SystemId::PVI: {
      const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t,
                    k = par.k, th = par.theta;
      (void)th1;
      const CMat qp = q * p, pq = p * q;
      const CMat A0 = blocks((-1.0 - tht) * I, q / t - I, Z, Z);
      const CMat A1 = blocks(-qp + 0.5 * (k + th) * I, I,
                             (th * I - qp) * qp + 0.25 * (k * k - th * th) * I,
                             qp + 0.5 * (k - th) * I);
      const CMat At = blocks(qp - th0 * I, -q / t, t * (-th0 * I + pq) * p, -pq);
      const CMat Bm =
          blocks((t * (anticommutator(q, p) - th0 * I) + th * q -
                  anticommutator(qp, q)) / (t * (t - 1.0)),
                 Z, -th0 * p + p * qp, Z);
      out.A = A0 / z + A1 / (z - 1.0) + At / (z - t);
      out.B = -(At / (z - t) + Bm);
      return out;
    }
    case SystemId::PV: {
      const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
      const CMat qp = q * p;
      const CMat Z1 = qp + (th0 + th1) * I;
      const CMat Z2 = (q * qp - qp + (th0 + th1) * q - th1 * I) / t;
      const CMat S1 = qp * q - p * q + (th0 + th1) * q + th2 * I;
      const CMat S2 = -(qp - p + (th0 + th1) * I) / t;
      const CMat E22 = blocks(Z, Z, Z, I);
      const CMat A0 = blocks(Z1 - Z1 * q, Z1 * Z2, t * (I - q), t * Z2);
      const CMat A1 = blocks(S1, S1 * S2, t * q, t * q * S2);
      out.A = -t * E22 + A0 / z + A1 / (z - 1.0);
      out.B = blocks(Z, (Z1 * Z2 + S1 * S2) / t, I,
                     -z * I + (t * q + commutator(p, q) +
                               (1.0 - th0 - 2.0 * th1 - th2) * I) / t);
      return out;
    }
    case SystemId::PIV: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      const CMat qp = q * p, pq = p * q;
      out.A = blocks(-pq / z, qp + (th0 + th1) * I - (pq * p + th0 * p) / z,
                     I + q / z, (-z + t) * I + (qp + th0 * I) / z);
      out.B = blocks(Z, -qp - (th0 + th1) * I, -I, (z - t) * I - q);
      return out;
    }
    case SystemId::PIII_D6: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      const CMat qp = q * p, pq = p * q;
      out.A = blocks((qp + th1 * I) / (z - 1.0), t * I - (qp * q + th1 * q) / (z - 1.0),
                     -(p - I) / z + p / (z - 1.0), th0 / z * I - pq / (z - 1.0));
      out.B = blocks((pq - th0 * I) / t, z * I, I / t, -(qp + th1 * I) / t);
      return out;
    }
    case SystemId::PIII_D7: {
      const Complex th = par.theta;
      const CMat qp = q * p, pq = p * q;
      // (1,2) entry 1 + q/z is forced by zero curvature with this B.
      out.A = blocks(qp / z, I + q / z, t * p / (z * z) + I / z,
                     t / (z * z) * I + (-pq + th * I) / z);
      out.B = blocks(Z, -q / t, -p / z, -I / z);
      return out;
    }
    case SystemId::PIII_D8: {
      const CMat qi = q.partialPivLu().inverse();
      const CMat qp = q * p, pq = p * q;
      out.A = blocks(qp / z, -q / z + I, -t * qi / (z * z) + I / z, -(pq + I) / z);
      out.B = blocks(Z, q / t, qi / z, Z);
      return out;
    }
    case SystemId::PII: {
      const Complex th = par.theta;
      const CMat q2 = q * q;
      out.A = blocks(0.5 * kI * z * z * I + kI * q2 + 0.5 * kI * t * I,
                     z * q - kI * p - th / z * I, z * q + kI * p - th / z * I,
                     -0.5 * kI * z * z * I - kI * q2 - 0.5 * kI * t * I);
      out.B = blocks(0.5 * kI * z * I, q, q, -0.5 * kI * z * I);
      return out;
    }
    case SystemId::PI: {
      out.A = blocks(p, z * I - q, z * z * I + z * q + q * q + 0.5 * t * I, -p);
      out.B = blocks(Z, 0.5 * I, 0.5 * z * I + q, Z);
      return out;
    }
  }
  throw ConfigError("unreachable system");
}

std::pair<CMat, CMat> flow_fields(SystemId sys, const ParamSet& par,
                                  const MatrixState& st) {
  validate_state(sys, st);
  const Eigen::Index n = st.n();
  const CMat& q = st.q;
  const CMat& p = st.p;
  const Complex t = st.t;
  const CMat I = eye(n);

  switch (sys) {
    case SystemId::PVI: {
      const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t,
                    k = par.k, th = par.theta;
      const CMat q2 = q * q, p2 = p * p;
      const CMat a = (-th0 * t * I + (th0 + tht) * q + (th0 + th1) * t * q -
                      th * q2 - 2.0 * q * p * q + t * anticommutator(p, q) -
                      anticommutator(t * p, q2) + anticommutator(q * p * q, q)) /
                     (t * (t - 1.0));
      const CMat b =
          (0.25 * (k * k - th * th) * I - (th0 + tht) * p - (th0 + th1) * t * p +
           th * anticommutator(q, p) - t * p2 + t * anticommutator(q, p2) +
           p * (2.0 * q - q2) * p - anticommutator(q, p * q * p)) /
          (t * (t - 1.0));
      return {a, b};
    }
    case SystemId::PV: {
      const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
      const CMat q2 = q * q, p2 = p * p;
      const CMat a = (anticommutator(p, q2) - anticommutator(p, q) + t * (q2 - q) +
                      (th0 - th2) * q + th2 * I) / t;
      const CMat b = (-anticommutator(p2, q) + p2 -
                      t * (anticommutator(p, q) + (th0 + th1) * I) +
                      (th2 - th0 + t) * p) / t;
      return {a, b};
    }
    case SystemId::PIV: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      const CMat apq = anticommutator(p, q);
      return {apq - q * q - t * q + th0 * I, apq - p * p + t * p + (th0 + th1) * I};
    }
    case SystemId::PIII_D6: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      const CMat q2 = q * q, p2 = p * p;
      const CMat a = (anticommutator(p, q2) - q2 + (th1 - th0) * q + t * I) / t;
      const CMat b = (-anticommutator(p2, q) + anticommutator(p, q) -
                      (th1 - th0) * p + th1 * I) / t;
      return {a, b};
    }
    case SystemId::PIII_D7: {
      const Complex th = par.theta;
      return {(2.0 * q * p * q - th * q + t * I) / t,
              -(2.0 * p * q * p - th * p + I) / t};
    }
    case SystemId::PIII_D8: {
      const CMat qi = q.partialPivLu().inverse();
      return {(2.0 * q * p * q + q) / t, -(2.0 * p * q * p + p - I) / t - qi * qi};
    }
    case SystemId::PII: {
      return {p, 2.0 * q * q * q + t * q + par.theta * I};
    }
    case SystemId::PI: {
      return {p, 1.5 * q * q + 0.25 * t * I};
    }
  }
  throw ConfigError("unreachable system");
}

Complex matrix_hamiltonian(SystemId sys, const ParamSet& par,
                           const MatrixState& st) {
  validate_state(sys, st);
  const CMat& q = st.q;
  const CMat& p = st.p;
  const Complex t = st.t;
  const Eigen::Index n = st.n();
  const CMat I = eye(n);

  switch (sys) {
    case SystemId::PVI: {
      const Complex th0 = par.theta0, th1 = par.theta1, tht = par.theta_t,
                    k = par.k, th = par.theta;
      const CMat qp = q * p, pq = p * q;
      const CMat m = qp * qp * q - t * pq * q * p + t * p * q * p - pq * pq -
                     th * qp * q + t * (th0 + th1) * pq + (th0 + tht) * pq -
                     th0 * t * p - 0.25 * (k * k - th * th) * q;
      return m.trace() / (t * (t - 1.0));
    }
    case SystemId::PV: {
      const Complex th0 = par.theta0, th1 = par.theta1, th2 = par.theta2;
      const CMat m = p * (p + t * I) * q * (q - I) + (th0 - th2) * p * q +
                     th2 * p + (th0 + th1) * t * q;
      return m.trace() / t;
    }
    case SystemId::PIV: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      const CMat m = p * q * (p - q - t * I) + th0 * p - (th0 + th1) * q;
      return m.trace();
    }
    case SystemId::PIII_D6: {
      const Complex th0 = par.theta0, th1 = par.theta1;
      const CMat m = p * p * q * q - (q * q + (th0 - th1) * q - t * I) * p - th1 * q;
      return m.trace() / t;
    }
    case SystemId::PIII_D7: {
      const CMat pq = p * q;
      const CMat m = pq * pq - par.theta * pq + t * p + q;
      return m.trace() / t;
    }
    case SystemId::PIII_D8: {
      const CMat qi = q.partialPivLu().inverse();
      const CMat pq = p * q;
      const CMat m = pq * pq + pq - q - t * qi;
      return m.trace() / t;
    }
    case SystemId::PII: {
      const CMat u = q * q + 0.5 * t * I;
      const CMat m = 0.5 * p * p - 0.5 * u * u - par.theta * q;
      return m.trace();
    }
    case SystemId::PI: {
      const CMat m = 0.5 * p * p - 0.5 * q * q * q - 0.25 * t * q;
      return m.trace();
    }
  }
  throw ConfigError("unreachable system");
}

double gradient_consistency_residual(SystemId sys, const ParamSet& par,
                                     const MatrixState& st, double h) {
  validate_state(sys, st);
  if (!(h > 0)) throw InvalidState("finite-difference step must be positive");
  const Eigen::Index n = st.n();
  auto [acal, bcal] = flow_fields(sys, par, st);

  double cr_mismatch = 0.0;
  auto grad = [&](bool wrt_p) {
    CMat g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        // d TrH / d m_{ji} goes to slot (i, j)
        auto eval = [&](Complex delta) {
          MatrixState s = st;
          (wrt_p ? s.p : s.q)(j, i) += delta;
          return matrix_hamiltonian(sys, par, s);
        };
        const Complex dre = (eval(h) - eval(-h)) / (2.0 * h);
        const Complex dim = (eval(kI * h) - eval(-kI * h)) / (2.0 * h * kI);
        cr_mismatch = std::max(cr_mismatch, std::abs(dre - dim));
        g(i, j) = 0.5 * (dre + dim);
      }
    }
    return g;
  };

  const CMat gp = grad(true);
  const CMat gq = grad(false);
  const double den = std::max({1.0, acal.norm(), bcal.norm()});
  return std::max({(acal - gp).norm(), (bcal + gq).norm(), cr_mismatch}) / den;
}

double zero_curvature_residual(SystemId sys, const ParamSet& par,
                               const MatrixState& st, Complex z, double dt,
                               double dz) {
  validate_state(sys, st);
  const LaxValue mid = lax_pair_eval(sys, par, st, z);

  const MatrixState fwd = advance_state(sys, par, st, st.t + dt, 1e-12);
  const MatrixState bwd = advance_state(sys, par, st, st.t - dt, 1e-12);
  const CMat dA = (lax_pair_eval(sys, par, fwd, z).A - lax_pair_eval(sys, par, bwd, z).A) /
                  (2.0 * dt);
  const CMat dB = (lax_pair_eval(sys, par, st, z + dz).B -
                   lax_pair_eval(sys, par, st, z - dz).B) /
                  (2.0 * dz);
  const CMat r = dA - dB + commutator(mid.A, mid.B);
  return r.norm() / std::max(1.0, mid.A.norm());
}

}  // namespace cplab
