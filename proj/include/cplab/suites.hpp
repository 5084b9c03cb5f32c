#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "cplab/canonical.hpp"
#include "cplab/monodromy.hpp"
#include "cplab/reduction.hpp"

namespace cplab::suites {

/// Desk-scale random data used by the verification suites: complex entries
/// uniform in [-0.25, 0.25]^2, parameters likewise, sample times drawn from
/// the per-family default window.
struct Rng {
  explicit Rng(uint64_t seed) : gen(seed) {}
  std::mt19937_64 gen;

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  Complex small_complex(double scale = 0.25) {
    const double re = uniform(-scale, scale);
    return {re, uniform(-scale, scale)};
  }
  CMat small_matrix(Eigen::Index n, double scale = 0.25) {
    CMat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = small_complex(scale);
    return m;
  }
};

ParamSet random_params(SystemId sys, Rng& rng);
MatrixState random_state(SystemId sys, Eigen::Index n, Rng& rng);
/// Well-separated particle positions appropriate for the family's window.
ParticleState random_particles(SystemId sys, Eigen::Index n, Complex g, Rng& rng);

double gradient_consistency(SystemId sys, Eigen::Index n, uint64_t seed,
                            int trials = 5, double h = 1e-5);
double zero_curvature(SystemId sys, Eigen::Index n, uint64_t seed, int n_z = 3,
                      double dt = 1e-4, double dz = 1e-4, double tol = 1e-10);
double commutator_drift_suite(SystemId sys, Eigen::Index n, uint64_t seed,
                              double tol = 1e-10);

struct KksResult {
  double x_error;
  double ylaw_error;
};
KksResult kks_roundtrip(Eigen::Index n, uint64_t seed, int count = 20);

double gauge_equation(SystemId sys, uint64_t seed, int check_points = 6);
double spectral_match_suite(SystemId sys, uint64_t seed, double tol = 1e-11,
                            int n_samples = 33);

struct FRowResult {
  double row_law;     // worst |F_jj + sum_k F_jk - K| across families
  double pii_diag;    // |diag F| for the PII n=2 case (exact zero expected)
};
FRowResult f_row_law(uint64_t seed);

struct EllipticResult {
  double e_sum;        // worst |e1+e2+e3| over the tau test set
  double cubic;        // worst relative cubic-identity defect
};
EllipticResult elliptic_identities(int trunc_n = 60);

double canonical_symplectic(SystemId sys, uint64_t seed, int points = 10,
                            double h = 1e-6);
double pushforward(SystemId sys, uint64_t seed, int n_samples = 257);

struct StokesSuiteResult {
  double commutative;   // worst residual over the Q = +-1 sign-mapped points
  double monodromy_eig; // n=1 eigenvalue defect against e^{-+2 i pi theta}
  bool parity_table_ok; // (ig, n) classification table
};
StokesSuiteResult stokes_commutative(uint64_t seed, int points = 50);

double sylvester(uint64_t seed, int count = 100);

}  // namespace cplab::suites
