#include "cplab/matcore.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace cplab {

void require_finite(const CMat& m, const char* what) {
  if (!m.allFinite()) throw NonFiniteInput(what);
}

static void require_square_same(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionMismatch("expected square matrices of equal size");
}

CMat commutator(const CMat& a, const CMat& b) {
  require_square_same(a, b);
  return a * b - b * a;
}

CMat anticommutator(const CMat& a, const CMat& b) {
  require_square_same(a, b);
  return a * b + b * a;
}

double min_pairwise_separation(const CVec& values) {
  const auto n = values.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      sep = std::min(sep, std::abs(values[i] - values[j]));
  return sep;
}

static bool lex_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

EigDecomp eig_diagonalize(const CMat& m, double sep_min, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eig needs a square matrix");
  require_finite(m, "eig input");
  const Eigen::Index n = m.rows();

  Eigen::ComplexEigenSolver<CMat> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("complex QR iteration did not converge");

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const CVec raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return lex_less(raw[a], raw[b]); });

  EigDecomp out;
  out.lambda.resize(n);
  out.V.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.lambda[i] = raw[order[static_cast<size_t>(i)]];
    out.V.col(i) = solver.eigenvectors().col(order[static_cast<size_t>(i)]);
  }

  const double sep = min_pairwise_separation(out.lambda);
  if (sep < sep_min)
    throw EigenvalueCollision("min eigenvalue separation " + std::to_string(sep));

  Eigen::JacobiSVD<CMat> svd(out.V);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  if (smin <= 0.0)
    throw EigenvalueCollision("eigenvector matrix is singular");
  out.cond_estimate = smax / smin;

  const double scale = std::max(1.0, m.norm());
  const double resid = (m * out.V - out.V * out.lambda.asDiagonal()).norm();
  if (resid > tol * scale)
    throw NonConvergence("eig residual " + std::to_string(resid / scale));
  return out;
}

CMat sylvester_ad_solve(const CMat& k, const CMat& r) {
  require_square_same(k, r);
  require_finite(k, "sylvester k");
  require_finite(r, "sylvester r");
  const Eigen::Index n = k.rows();
  const double kscale = std::max(1.0, k.norm());

  CMat y;
  bool solved = false;
  try {
    EigDecomp ed = eig_diagonalize(k, 1e-12 * kscale, 1e-8);
    // k = V diag(kappa) V^{-1}; in that basis the operator acts entrywise.
    const CMat vinv = ed.V.partialPivLu().inverse();
    CMat rt = vinv * r * ed.V;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const Complex f = 1.0 + ed.lambda[i] - ed.lambda[j];
        if (std::abs(f) < 1e-12 * kscale)
          throw SingularOperator("factor 1 + k_i - k_j vanishes");
        rt(i, j) /= f;
      }
    }
    y = ed.V * rt * vinv;
    solved = true;
  } catch (const SingularOperator&) {
    throw;
  } catch (const Error&) {
    // near-defective k: dense fallback below
  }

  if (!solved) {
    // vec(Y) + (I (x) k - k^T (x) I) vec(Y) = vec(r), column-major vec.
    const Eigen::Index N = n * n;
    CMat op = CMat::Identity(N, N);
    for (Eigen::Index col = 0; col < n; ++col)
      op.block(col * n, col * n, n, n) += k;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        op.block(i * n, j * n, n, n).diagonal().array() -= k(j, i);
    Eigen::PartialPivLU<CMat> lu(op);
    CVec vecr(N);
    for (Eigen::Index col = 0; col < n; ++col) vecr.segment(col * n, n) = r.col(col);
    CVec vecy = lu.solve(vecr);
    y.resize(n, n);
    for (Eigen::Index col = 0; col < n; ++col) y.col(col) = vecy.segment(col * n, n);
  }

  const double resid = (y + k * y - y * k - r).norm();
  if (resid > 1e-12 * std::max(1.0, r.norm()))
    throw SingularOperator("substitution residual " + std::to_string(resid) +
                           " exceeds 1e-12 relative");
  return y;
}

}  // namespace cplab
