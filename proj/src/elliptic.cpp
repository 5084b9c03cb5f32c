#include "cplab/elliptic.hpp"

#include <cmath>

namespace cplab {

namespace {

struct CotCsc {
  Complex cot;
  Complex csc2;
};

// cot(pi z) and csc^2(pi z) through the exponentially small side of
// e^{+-2 pi i z}, stable for large |Im z|.
CotCsc cot_csc2(Complex z) {
  CotCsc out;
  if (z.imag() >= 0) {
    const Complex e = std::exp(2.0 * kI * kPi * z);  // |e| <= 1
    out.cot = kI * (e + 1.0) / (e - 1.0);
    out.csc2 = -4.0 * e / ((e - 1.0) * (e - 1.0));
  } else {
    const Complex e = std::exp(-2.0 * kI * kPi * z);
    out.cot = -kI * (e + 1.0) / (e - 1.0);
    out.csc2 = -4.0 * e / ((e - 1.0) * (e - 1.0));
  }
  return out;
}

double lattice_distance(Complex u, Complex tau) {
  // distance from u to Z + tau Z via coordinates in the (1, tau) frame
  const double det = tau.imag();
  const double b = u.imag() / det;
  const double a = u.real() - b * tau.real();
  double best = std::numeric_limits<double>::infinity();
  const double a0 = std::round(a), b0 = std::round(b);
  for (int da = -1; da <= 1; ++da)
    for (int db = -1; db <= 1; ++db) {
      const Complex w = (a0 + da) + (b0 + db) * tau;
      best = std::min(best, std::abs(u - w));
    }
  return best;
}

}  // namespace

EllipticContext::EllipticContext(Complex tau, int trunc_n)
    : tau_(tau), trunc_n_(trunc_n) {
  if (!(tau.imag() > 0)) throw InvalidState("Im(tau) must be positive");
  if (trunc_n < 1) throw InvalidState("truncation radius must be >= 1");
  omegas_ = {Complex(0), Complex(0.5), -(1.0 + tau) / 2.0, tau / 2.0};
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    const WpJet j = wp_jet(*this, omegas_[static_cast<size_t>(i + 1)]);
    e_[static_cast<size_t>(i)] = j.wp;
    err = std::max(err, j.error_estimate);
  }
  err_ = err;
}

WpJet wp_jet(const EllipticContext& ctx, Complex u) {
  const Complex tau = ctx.tau();
  if (lattice_distance(u, tau) < 1e-6)
    throw LatticePoint("u within 1e-6 of the period lattice");

  const double pi2 = kPi * kPi;
  Complex wp = -pi2 / 3.0;
  Complex wpp = 0.0;
  double last = 0.0;
  const int N = ctx.trunc_n();
  for (int n = -N; n <= N; ++n) {
    const Complex zn = u + static_cast<double>(n) * tau;
    const CotCsc c = cot_csc2(zn);
    Complex term = pi2 * c.csc2;
    if (n != 0) {
      const CotCsc c0 = cot_csc2(static_cast<double>(n) * tau);
      term -= pi2 * c0.csc2;
    }
    const Complex dterm = -2.0 * kPi * pi2 * c.cot * c.csc2;
    wp += term;
    wpp += dterm;
    if (std::abs(n) == N)
      last = std::max({last, std::abs(term), std::abs(dterm)});
  }
  // error: last-row contribution plus the machine floor of the n=0 row
  const double est = last + 1e-15 * std::max(std::abs(wp), std::abs(wpp));
  return {wp, wpp, est};
}

std::array<Complex, 3> half_periods(const EllipticContext& ctx) { return ctx.e(); }

Complex lambda_t(const EllipticContext& ctx) {
  const auto& e = ctx.e();
  const Complex den = e[1] - e[0];
  if (std::abs(den) < 1e-14) throw InvalidState("e2 == e1");
  return (e[2] - e[0]) / den;
}

}  // namespace cplab
