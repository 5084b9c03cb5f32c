#include "cplab/flows.hpp"

#include <algorithm>
#include <cmath>

#include "cplab/matcore.hpp"

namespace cplab {
namespace detail {

std::vector<CVec> rk45(const std::function<CVec(double, const CVec&)>& f,
                       const CVec& y0, double length,
                       const std::vector<double>& out_grid, double tol,
                       long max_steps) {
  // Dormand-Prince 5(4); the 5th-order solution is propagated.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<CVec> out;
  out.reserve(out_grid.size());
  CVec y = y0;
  double s = 0.0;
  size_t next = 0;
  if (!out_grid.empty() && out_grid[0] == 0.0) {
    out.push_back(y);
    next = 1;
  }
  if (length == 0.0) {
    while (next < out_grid.size()) { out.push_back(y); ++next; }
    return out;
  }

  CVec k1 = f(s, y);
  double h = std::min(length / 16.0, std::pow(tol, 0.25) * length);
  const double hmin = std::max(length, 1.0) * 1e-15 * 4;
  long steps = 0;

  while (next < out_grid.size()) {
    if (++steps > max_steps) throw StepFailure("max_steps exceeded");
    bool clipped = false;
    if (s + h >= out_grid[next]) {
      h = out_grid[next] - s;
      clipped = true;
    }
    if (s + h > length) { h = length - s; }
    if (h < hmin) throw StepFailure("step size underflow at s=" + std::to_string(s));

    const CVec k2 = f(s + c2 * h, y + h * (a21 * k1));
    const CVec k3 = f(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const CVec k4 = f(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const CVec k5 = f(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const CVec k6 = f(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const CVec y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const CVec k7 = f(s + h, y5);
    const CVec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    // error-per-unit-step control: local error <= tol * (h / length), so the
    // accumulated error over the whole segment stays of order tol
    const double budget = std::max(tol * (h / length), 1e-15);  // machine floor
    double ratio = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = budget * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
      ratio = std::max(ratio, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(ratio)) throw StepFailure("non-finite step (movable pole?)");

    if (ratio <= 1.0) {
      s += h;
      y = y5;
      k1 = k7;  // FSAL
      if (clipped) {
        out.push_back(y);
        ++next;
      }
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(ratio, 1e-12), -0.2), 0.2, 5.0);
    h *= fac;
  }
  return out;
}

}  // namespace detail

namespace {

CVec pack(const MatrixState& st) {
  const Eigen::Index n = st.n();
  CVec v(2 * n * n);
  for (Eigen::Index c = 0; c < n; ++c) {
    v.segment(c * n, n) = st.q.col(c);
    v.segment(n * n + c * n, n) = st.p.col(c);
  }
  return v;
}

MatrixState unpack(const CVec& v, Eigen::Index n, Complex t) {
  MatrixState st;
  st.q.resize(n, n);
  st.p.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    st.q.col(c) = v.segment(c * n, n);
    st.p.col(c) = v.segment(n * n + c * n, n);
  }
  st.t = t;
  return st;
}

double segment_distance(Complex a, Complex b, Complex point) {
  const Complex d = b - a;
  const double L2 = std::norm(d);
  if (L2 == 0.0) return std::abs(point - a);
  double u = ((point - a) * std::conj(d)).real() / L2;
  u = std::clamp(u, 0.0, 1.0);
  return std::abs(point - (a + u * d));
}

}  // namespace

Trajectory integrate_matrix_flow(SystemId sys, const ParamSet& par,
                                 const MatrixState& st0, Complex t1, double tol,
                                 long max_steps, const IntegrateOptions& opt) {
  validate_state(sys, st0);
  for (Complex bad : forbidden_times(sys))
    if (segment_distance(st0.t, t1, bad) < opt.min_path_distance)
      throw ForbiddenTimePath("time segment passes within " +
                              std::to_string(opt.min_path_distance) +
                              " of a fixed singular time");

  const Eigen::Index n = st0.n();
  const double length = std::abs(t1 - st0.t);
  const Complex dir = length > 0 ? (t1 - st0.t) / length : Complex(1);

  auto f = [&](double s, const CVec& v) -> CVec {
    MatrixState st = unpack(v, n, st0.t + s * dir);
    auto [a, b] = flow_fields(sys, par, st);
    CVec dv(2 * n * n);
    for (Eigen::Index c = 0; c < n; ++c) {
      dv.segment(c * n, n) = dir * a.col(c);
      dv.segment(n * n + c * n, n) = dir * b.col(c);
    }
    return dv;
  };

  const int m = std::max(2, opt.n_samples);
  std::vector<double> grid(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) grid[static_cast<size_t>(i)] = length * i / (m - 1);

  const std::vector<CVec> ys = detail::rk45(f, pack(st0), length, grid, tol,
                                            max_steps > 0 ? max_steps : opt.max_steps);
  Trajectory tr;
  tr.sys = sys;
  tr.par = par;
  tr.tol = tol;
  tr.samples.reserve(ys.size());
  for (size_t i = 0; i < ys.size(); ++i)
    tr.samples.push_back(unpack(ys[i], n, st0.t + grid[i] * dir));
  for (const MatrixState& st : tr.samples) validate_state(sys, st);
  return tr;
}

MatrixState advance_state(SystemId sys, const ParamSet& par,
                          const MatrixState& st, Complex t1, double tol) {
  const Eigen::Index n = st.n();
  const double length = std::abs(t1 - st.t);
  const Complex dir = length > 0 ? (t1 - st.t) / length : Complex(1);
  auto f = [&](double s, const CVec& v) -> CVec {
    MatrixState cur = unpack(v, n, st.t + s * dir);
    auto [a, b] = flow_fields(sys, par, cur);
    CVec dv(2 * n * n);
    for (Eigen::Index c = 0; c < n; ++c) {
      dv.segment(c * n, n) = dir * a.col(c);
      dv.segment(n * n + c * n, n) = dir * b.col(c);
    }
    return dv;
  };
  const std::vector<CVec> ys =
      detail::rk45(f, pack(st), length, {0.0, length}, tol, 100000);
  return unpack(ys.back(), n, t1);
}

double commutator_drift(const Trajectory& tr) {
  if (tr.samples.empty()) throw EmptyTrajectory("commutator_drift");
  const CMat m0 = commutator(tr.samples.front().p, tr.samples.front().q);
  const double den = std::max(1.0, m0.norm());
  double worst = 0.0;
  for (const MatrixState& st : tr.samples)
    worst = std::max(worst, (commutator(st.p, st.q) - m0).norm() / den);
  return worst;
}

std::vector<std::pair<Complex, Complex>> hamiltonian_log(const Trajectory& tr) {
  if (tr.samples.empty()) throw EmptyTrajectory("hamiltonian_log");
  std::vector<std::pair<Complex, Complex>> out;
  out.reserve(tr.samples.size());
  for (const MatrixState& st : tr.samples)
    out.emplace_back(st.t, matrix_hamiltonian(tr.sys, tr.par, st));
  return out;
}

}  // namespace cplab
