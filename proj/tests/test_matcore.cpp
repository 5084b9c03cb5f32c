#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cplab/matcore.hpp"

using namespace cplab;

namespace {

CMat m2(Complex a, Complex b, Complex c, Complex d) {
  CMat m(2, 2);
  m << a, b, c, d;
  return m;
}

std::mt19937_64 rng(42);

CMat random_mat(Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  CMat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  return m;
}

// independent oracle: assemble Id + ad_k as a dense n^2 x n^2 operator from
// scratch (row-major vec, unlike the implementation) and solve
CMat sylvester_dense_oracle(const CMat& k, const CMat& r) {
  const Eigen::Index n = k.rows();
  const Eigen::Index N = n * n;
  CMat op = CMat::Zero(N, N);
  auto idx = [n](Eigen::Index i, Eigen::Index j) { return i * n + j; };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      op(idx(i, j), idx(i, j)) += 1.0;
      for (Eigen::Index l = 0; l < n; ++l) {
        op(idx(i, j), idx(l, j)) += k(i, l);   // (kY)_{ij}
        op(idx(i, j), idx(i, l)) -= k(l, j);   // -(Yk)_{ij}
      }
    }
  CVec rhs(N);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) rhs[idx(i, j)] = r(i, j);
  const CVec sol = op.partialPivLu().solve(rhs);
  CMat y(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) y(i, j) = sol[idx(i, j)];
  return y;
}

}  // namespace

TEST_CASE("commutator basics") {
  const CMat e12 = m2(0, 1, 0, 0);
  const CMat e21 = m2(0, 0, 1, 0);
  CHECK((commutator(e12, e21) - m2(1, 0, 0, -1)).norm() == doctest::Approx(0));

  const CMat b = random_mat(3);
  CHECK(commutator(CMat::Identity(3, 3), b).norm() == doctest::Approx(0));
  CHECK(commutator(b, b).norm() == doctest::Approx(0));

  CHECK_THROWS_AS(commutator(random_mat(2), random_mat(3)), DimensionMismatch);
}

TEST_CASE("anticommutator basics") {
  const CMat b = random_mat(2);
  CHECK((anticommutator(CMat::Identity(2, 2), b) - 2.0 * b).norm() ==
        doctest::Approx(0));

  CMat d1 = CMat::Zero(2, 2), d2 = CMat::Zero(2, 2);
  d1.diagonal() << 1.0, 2.0;
  d2.diagonal() << 3.0, 4.0;
  CMat want = CMat::Zero(2, 2);
  want.diagonal() << 6.0, 16.0;
  CHECK((anticommutator(d1, d2) - want).norm() == doctest::Approx(0));

  CHECK((anticommutator(m2(0, 1, 0, 0), m2(0, 0, 1, 0)) - CMat::Identity(2, 2))
            .norm() == doctest::Approx(0));
}

TEST_CASE("jacobi identity on random triples") {
  for (int k = 0; k < 20; ++k) {
    const CMat a = random_mat(3), b = random_mat(3), c = random_mat(3);
    const CMat j = commutator(a, commutator(b, c)) +
                   commutator(b, commutator(c, a)) +
                   commutator(c, commutator(a, b));
    CHECK(j.norm() < 1e-12 * std::max(1.0, a.norm() * b.norm() * c.norm()));
  }
}

TEST_CASE("eig of a diagonal matrix is ordered canonically") {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = Complex(3, 0);
  m(1, 1) = Complex(1, 1);
  const EigDecomp ed = eig_diagonalize(m);
  CHECK(ed.lambda[0] == Complex(1, 1));
  CHECK(ed.lambda[1] == Complex(3, 0));
  // V is a permutation of the identity up to phase
  CHECK(std::abs(std::abs(ed.V(1, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(ed.V(0, 1)) - 1.0) < 1e-12);
}

TEST_CASE("eig of [[0,1],[1,0]]") {
  const EigDecomp ed = eig_diagonalize(m2(0, 1, 1, 0));
  CHECK(std::abs(ed.lambda[0] - Complex(-1)) < 1e-12);
  CHECK(std::abs(ed.lambda[1] - Complex(1)) < 1e-12);
  // columns proportional to (1, -+1)
  CHECK(std::abs(ed.V(0, 0) + ed.V(1, 0)) < 1e-12);
  CHECK(std::abs(ed.V(0, 1) - ed.V(1, 1)) < 1e-12);
}

TEST_CASE("eig rejects a Jordan block") {
  CHECK_THROWS_AS(eig_diagonalize(m2(1, 1, 0, 1)), EigenvalueCollision);
}

TEST_CASE("eig reassembly reproduces the input") {
  for (int k = 0; k < 10; ++k) {
    const CMat m = random_mat(4);
    const EigDecomp ed = eig_diagonalize(m);
    const CMat back = ed.V * ed.lambda.asDiagonal() *
                      ed.V.partialPivLu().inverse();
    CHECK((back - m).norm() < 1e-10 * std::max(1.0, m.norm()));
  }
}

TEST_CASE("eig rejects non-finite input") {
  CMat m = m2(1, 0, 0, 2);
  m(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(eig_diagonalize(m), NonFiniteInput);
}

TEST_CASE("sylvester: k = 0 returns r") {
  const CMat r = random_mat(3);
  CHECK((sylvester_ad_solve(CMat::Zero(3, 3), r) - r).norm() < 1e-13);
}

TEST_CASE("sylvester: diagonal k closed form") {
  CMat k = CMat::Zero(2, 2);
  k.diagonal() << Complex(0.3, 0.1), Complex(-0.2, 0.4);
  const CMat r = random_mat(2);
  const CMat y = sylvester_ad_solve(k, r);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) {
      const Complex want = r(i, j) / (1.0 + k(i, i) - k(j, j));
      CHECK(std::abs(y(i, j) - want) < 1e-12);
    }
  CHECK((y - sylvester_dense_oracle(k, r)).norm() < 1e-12);
}

TEST_CASE("sylvester: singular factor detected") {
  CMat k = CMat::Zero(2, 2);
  k.diagonal() << Complex(0), Complex(-1);
  CHECK_THROWS_AS(sylvester_ad_solve(k, m2(0, 1, 0, 0)), SingularOperator);
}

TEST_CASE("sylvester matches the dense oracle on random instances") {
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 2 + (t % 3);
    const CMat k = random_mat(n, 0.4);
    const CMat r = random_mat(n);
    const CMat y = sylvester_ad_solve(k, r);
    CHECK((y + k * y - y * k - r).norm() < 1e-12 * std::max(1.0, r.norm()));
    CHECK((y - sylvester_dense_oracle(k, r)).norm() <
          1e-9 * std::max(1.0, r.norm()));
  }
}

TEST_CASE("sylvester falls back for defective k") {
  // k nilpotent (double eigenvalue 0, non-diagonalizable); Id + ad_k is still
  // invertible, the dense route must handle it
  const CMat k = m2(0, 1, 0, 0);
  const CMat r = random_mat(2);
  const CMat y = sylvester_ad_solve(k, r);
  CHECK((y + k * y - y * k - r).norm() < 1e-12 * std::max(1.0, r.norm()));
}
