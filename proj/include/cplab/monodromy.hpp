#pragma once

#include <array>
#include <optional>

#include "cplab/matcore.hpp"

namespace cplab {

/// Candidate point of the noncommutative Stokes manifold.
struct StokesData {
  CMat A, B, C;  // n x n Stokes operators
  CMat Q;        // formal-monodromy factor, invertible
  Complex theta{};
};

struct FormalJet {
  CMat Y12;  // = -q
  CMat Y13;  // solves Y + ad_{[q,p]} Y = -i(q^4 - p^2 + t q^2 + 2 theta q)
};

enum class Parity { Qplus, Qminus, Mixed };
std::string to_string(Parity p);

/// First-order coefficients of the formal solution at infinity.
FormalJet formal_jet(const CMat& q, const CMat& p, Complex t, Complex theta);

/// Frobenius norms of the five Stokes relations (left minus right).
std::array<double, 5> stokes_residuals(const StokesData& sd);

/// The eight-factor loop product (= M0^{-1}): lower/upper triangular Stokes
/// factors interleaved with diag(Q, Q) twice.
CMat monodromy_product(const StokesData& sd);

/// Square-root factor G = U(A) L(B) U(C) diag(Q,Q) sigma1 of the loop
/// product; G^2 equals the sigma1-conjugated monodromy_product identically.
CMat monodromy_sqrt(const StokesData& sd);

/// a + b + c + abc + 2 i sin(pi nu).
Complex scalar_cubic_residual(Complex a, Complex b, Complex c, Complex nu);

/// Classification of e^{i pi i g (1 - v^T v)}: Qplus when ig is an even
/// integer, Qminus when ig is odd and n even, Mixed otherwise.
Parity coupling_parity(Complex g, Eigen::Index n);

/// Q = e^{i pi [p,q]} on the orbit [p,q] = ig(1 - v^T v), in closed form via
/// the rank-one projector.
CMat kks_formal_monodromy(Complex g, Eigen::Index n);

struct StokesSearchResult {
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  StokesData point;
  int restarts_used = 0;
};

/// Damped Gauss-Newton on the concatenated residuals for (A, B, C) at fixed
/// Q and theta, with random restarts. Non-convergence is reported, not thrown.
StokesSearchResult stokes_search(const CMat& Q, Complex theta, uint64_t seed,
                                 int restarts = 50, int max_iter = 120,
                                 double target = 1e-10);

}  // namespace cplab
