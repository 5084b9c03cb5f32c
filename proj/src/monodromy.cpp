#include "cplab/monodromy.hpp"

#include <random>

#include <Eigen/LU>

namespace cplab {

namespace {

void validate(const StokesData& sd) {
  const Eigen::Index n = sd.A.rows();
  auto square = [&](const CMat& m) { return m.rows() == n && m.cols() == n; };
  if (n < 1 || !square(sd.A) || !square(sd.B) || !square(sd.C) || !square(sd.Q))
    throw DimensionMismatch("Stokes matrices must be square of equal size");
  Eigen::PartialPivLU<CMat> lu(sd.Q);
  const double scale = std::max(1.0, sd.Q.norm());
  if (std::abs(lu.determinant()) < 1e-12 * std::pow(scale, double(n)))
    throw SingularQ("Q is numerically singular");
}

CMat upper(const CMat& x) {
  const Eigen::Index n = x.rows();
  CMat m = CMat::Identity(2 * n, 2 * n);
  m.topRightCorner(n, n) = x;
  return m;
}

CMat lower(const CMat& x) {
  const Eigen::Index n = x.rows();
  CMat m = CMat::Identity(2 * n, 2 * n);
  m.bottomLeftCorner(n, n) = x;
  return m;
}

CMat qq(const CMat& q) {
  const Eigen::Index n = q.rows();
  CMat m = CMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = q;
  m.bottomRightCorner(n, n) = q;
  return m;
}

CMat sigma1(Eigen::Index n) {
  CMat m = CMat::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n).setIdentity();
  m.bottomLeftCorner(n, n).setIdentity();
  return m;
}

}  // namespace

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Qplus: return "Qplus";
    case Parity::Qminus: return "Qminus";
    case Parity::Mixed: return "Mixed";
  }
  return "?";
}

FormalJet formal_jet(const CMat& q, const CMat& p, Complex t, Complex theta) {
  if (q.rows() != q.cols() || p.rows() != p.cols() || q.rows() != p.rows())
    throw DimensionMismatch("formal_jet");
  const CMat k = commutator(q, p);
  const CMat q2 = q * q;
  const CMat rhs = -kI * (q2 * q2 - p * p + t * q2 + 2.0 * theta * q);
  FormalJet out;
  out.Y12 = -q;
  out.Y13 = sylvester_ad_solve(k, rhs);
  return out;
}

std::array<double, 5> stokes_residuals(const StokesData& sd) {
  validate(sd);
  const Eigen::Index n = sd.A.rows();
  const CMat I = CMat::Identity(n, n);
  const CMat Qi = sd.Q.partialPivLu().inverse();
  const Complex s = 2.0 * kI * std::sin(kPi * sd.theta);
  const CMat& A = sd.A;
  const CMat& B = sd.B;
  const CMat& C = sd.C;
  const CMat& Q = sd.Q;

  const CMat r1 = (A + C + A * B * C) * Q + Qi * B - s * I;
  const CMat r2 = (A * B + I) * Q - Qi * (B * A + I);
  const CMat r3 = C * Q * A - A * Qi * C + Q - Qi;
  const CMat r4 = (B * C + I) * Q - Qi * (C * B + I);
  const CMat r5 = B * Q + Qi * (A + C + C * B * A) - s * I;
  return {r1.norm(), r2.norm(), r3.norm(), r4.norm(), r5.norm()};
}

CMat monodromy_product(const StokesData& sd) {
  validate(sd);
  const CMat D = qq(sd.Q);
  return lower(sd.A) * upper(sd.B) * lower(sd.C) * D * upper(sd.A) *
         lower(sd.B) * upper(sd.C) * D;
}

CMat monodromy_sqrt(const StokesData& sd) {
  validate(sd);
  return upper(sd.A) * lower(sd.B) * upper(sd.C) * qq(sd.Q) * sigma1(sd.A.rows());
}

Complex scalar_cubic_residual(Complex a, Complex b, Complex c, Complex nu) {
  return a + b + c + a * b * c + 2.0 * kI * std::sin(kPi * nu);
}

Parity coupling_parity(Complex g, Eigen::Index n) {
  const Complex r = kI * g;
  const double re = r.real();
  const double nearest = std::round(re);
  const bool integer = std::abs(r.imag()) <= 1e-9 && std::abs(re - nearest) <= 1e-9;
  if (!integer) return Parity::Mixed;
  const long long m = static_cast<long long>(nearest);
  if (m % 2 == 0) return Parity::Qplus;
  if (n % 2 == 0) return Parity::Qminus;
  return Parity::Mixed;
}

CMat kks_formal_monodromy(Complex g, Eigen::Index n) {
  // 1 - v^T v = (I - P) + (1-n) P with P = (v^T v)/n, so the exponential
  // splits along the projector.
  const CMat P = CMat::Ones(n, n) / static_cast<double>(n);
  const Complex r = kI * g;
  const Complex a = std::exp(kI * kPi * r);
  const Complex b = std::exp(kI * kPi * r * static_cast<double>(1 - n));
  return a * (CMat::Identity(n, n) - P) + b * P;
}

StokesSearchResult stokes_search(const CMat& Q, Complex theta, uint64_t seed,
                                 int restarts, int max_iter, double target) {
  const Eigen::Index n = Q.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.5);
  auto rand_mat = [&]() {
    CMat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    return m;
  };

  {
    StokesData probe{CMat::Zero(n, n), CMat::Zero(n, n), CMat::Zero(n, n), Q, theta};
    validate(probe);
  }
  auto residual_vec = [&](const StokesData& sd) {
    const Eigen::Index N = n * n;
    const CMat I = CMat::Identity(n, n);
    const CMat Qi = sd.Q.partialPivLu().inverse();
    const Complex s = 2.0 * kI * std::sin(kPi * sd.theta);
    std::array<CMat, 5> rs = {
        (sd.A + sd.C + sd.A * sd.B * sd.C) * sd.Q + Qi * sd.B - s * I,
        (sd.A * sd.B + I) * sd.Q - Qi * (sd.B * sd.A + I),
        sd.C * sd.Q * sd.A - sd.A * Qi * sd.C + sd.Q - Qi,
        (sd.B * sd.C + I) * sd.Q - Qi * (sd.C * sd.B + I),
        sd.B * sd.Q + Qi * (sd.A + sd.C + sd.C * sd.B * sd.A) - s * I};
    Eigen::VectorXd v(10 * N);
    Eigen::Index at = 0;
    for (const CMat& r : rs)
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index i = 0; i < n; ++i) {
          v[at++] = r(i, c).real();
          v[at++] = r(i, c).imag();
        }
    return v;
  };

  StokesSearchResult best;
  for (int attempt = 0; attempt < restarts; ++attempt) {
    StokesData sd{rand_mat(), rand_mat(), rand_mat(), Q, theta};
    double lambda = 1e-3;
    for (int it = 0; it < max_iter; ++it) {
      const Eigen::VectorXd r0 = residual_vec(sd);
      const double f0 = r0.norm();
      if (f0 < target) break;
      // numerical Jacobian in the 6 n^2 real unknowns of (A, B, C)
      const Eigen::Index M = 6 * n * n;
      Eigen::MatrixXd J(r0.size(), M);
      const double h = 1e-7;
      Eigen::Index col = 0;
      for (CMat* m : {&sd.A, &sd.B, &sd.C}) {
        for (Eigen::Index c = 0; c < n; ++c)
          for (Eigen::Index i = 0; i < n; ++i)
            for (int part = 0; part < 2; ++part) {
              const Complex delta = part == 0 ? Complex(h, 0) : Complex(0, h);
              (*m)(i, c) += delta;
              const Eigen::VectorXd rp = residual_vec(sd);
              (*m)(i, c) -= 2.0 * delta;
              const Eigen::VectorXd rm = residual_vec(sd);
              (*m)(i, c) += delta;
              J.col(col++) = (rp - rm) / (2.0 * h);
            }
      }
      const Eigen::MatrixXd JtJ =
          J.transpose() * J + lambda * Eigen::MatrixXd::Identity(M, M);
      const Eigen::VectorXd step = JtJ.ldlt().solve(J.transpose() * r0);
      StokesData trial = sd;
      Eigen::Index at = 0;
      for (CMat* m : {&trial.A, &trial.B, &trial.C})
        for (Eigen::Index c = 0; c < n; ++c)
          for (Eigen::Index i = 0; i < n; ++i) {
            (*m)(i, c) -= Complex(step[at], step[at + 1]);
            at += 2;
          }
      if (residual_vec(trial).norm() < f0) {
        sd = trial;
        lambda = std::max(lambda * 0.3, 1e-12);
      } else {
        lambda *= 10.0;
        if (lambda > 1e8) break;
      }
    }
    const double fin = residual_vec(sd).norm();
    if (fin < best.residual) {
      best.residual = fin;
      best.point = sd;
      best.restarts_used = attempt + 1;
    }
    if (best.residual < target) {
      best.converged = true;
      break;
    }
  }
  return best;
}

}  // namespace cplab
