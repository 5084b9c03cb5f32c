#pragma once

#include <array>

#include "cplab/types.hpp"

namespace cplab {

/// Period lattice Z + tau Z with Im(tau) > 0, truncation radius N, the four
/// half-period shifts and the e_i = wp(omega_i) values.
class EllipticContext {
 public:
  explicit EllipticContext(Complex tau, int trunc_n = 60);

  Complex tau() const { return tau_; }
  int trunc_n() const { return trunc_n_; }
  const std::array<Complex, 4>& omegas() const { return omegas_; }
  /// (e1, e2, e3) at the shifts (1/2, -(1+tau)/2, tau/2).
  const std::array<Complex, 3>& e() const { return e_; }
  /// magnitude of the last summed row; decreases with trunc_n
  double error_estimate() const { return err_; }

 private:
  Complex tau_;
  int trunc_n_;
  std::array<Complex, 4> omegas_;
  std::array<Complex, 3> e_;
  double err_ = 0.0;
};

struct WpJet {
  Complex wp;
  Complex wp_prime;
  double error_estimate;
};

/// Weierstrass wp and wp' by lattice-row summation over |n| <= trunc_n: each
/// row sum_m collapses to its cotangent closed form, so the truncation error
/// is the exponentially small last-row term. Throws LatticePoint when u is
/// within 1e-6 of the lattice.
WpJet wp_jet(const EllipticContext& ctx, Complex u);

std::array<Complex, 3> half_periods(const EllipticContext& ctx);

/// t = (e3 - e1)/(e2 - e1).
Complex lambda_t(const EllipticContext& ctx);

}  // namespace cplab
