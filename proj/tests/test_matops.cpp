#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "vlcsec/matops.hpp"
#include "vlcsec/oracles.hpp"

using namespace vlcsec;
using testutil::randn;

TEST_CASE("vec stacks columns") {
  Matrix X(2, 2);
  X << 1, 2, 3, 4;
  Vector expect(4);
  expect << 1, 3, 2, 4;
  CHECK((vec(X) - expect).cwiseAbs().maxCoeff() == 0.0);

  Matrix col = Matrix::Random(5, 1);
  CHECK((vec(col) - col.col(0)).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(3);
  const Matrix Y = randn(rng, 4, 3);
  CHECK((unvec(vec(Y), 4, 3) - Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron basics") {
  Matrix B(2, 2);
  B << 1, 2, 3, 4;
  const Matrix K = kron(Matrix::Identity(2, 2), B);
  CHECK((K.topLeftCorner(2, 2) - B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((K.bottomRightCorner(2, 2) - B).cwiseAbs().maxCoeff() == 0.0);
  CHECK(K.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);

  Matrix a(1, 1), b(1, 1);
  a << 3.0;
  b << -2.0;
  CHECK(kron(a, b)(0, 0) == -6.0);
}

TEST_CASE("kron matches the triple-loop oracle and the vec identity") {
  std::mt19937 rng(5);
  const Matrix A = randn(rng, 3, 4);
  const Matrix B = randn(rng, 2, 5);
  CHECK((kron(A, B) - naive_kron(A, B)).cwiseAbs().maxCoeff() < 1e-15);

  // (A (x) B) vec(X) = vec(B X A^T)
  const Matrix X = randn(rng, 5, 4);
  const Vector lhs = kron(A, B) * vec(X);
  const Vector rhs = vec(Matrix(B * X * A.transpose()));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kron mixed-product and associativity") {
  std::mt19937 rng(7);
  const Matrix A = randn(rng, 2, 3), C = randn(rng, 3, 2);
  const Matrix B = randn(rng, 3, 2), D = randn(rng, 2, 4);
  const Matrix lhs = kron(A, B) * kron(C, D);
  const Matrix rhs = kron(Matrix(A * C), Matrix(B * D));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix E = randn(rng, 2, 2);
  const Matrix assoc1 = kron(kron(A, B), E);
  const Matrix assoc2 = kron(A, kron(B, E));
  CHECK((assoc1 - assoc2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("commutation matrix action for all shapes up to 5x5") {
  std::mt19937 rng(9);
  for (Eigen::Index m = 1; m <= 5; ++m) {
    for (Eigen::Index n = 1; n <= 5; ++n) {
      const CommutationMatrix K(m, n);
      const Matrix X = randn(rng, m, n);
      CHECK((K.apply(vec(X)) - vec(Matrix(X.transpose())))
                .cwiseAbs()
                .maxCoeff() == 0.0);
      // dense form agrees with the permutation action
      CHECK((K.dense() * vec(X) - vec(Matrix(X.transpose())))
                .cwiseAbs()
                .maxCoeff() == 0.0);
      // K_{m,n} K_{n,m} = I
      const CommutationMatrix Kback(n, m);
      const Matrix I = K.dense() * Kback.dense();
      CHECK((I - Matrix::Identity(m * n, m * n)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("nearest_psd clips negative eigenvalues") {
  Matrix G = Matrix::Zero(2, 2);
  G(0, 0) = 1.0;
  G(1, 1) = -2.0;
  const Matrix P = nearest_psd(G);
  CHECK(P(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(P(1, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(P(0, 1)) < 1e-14);
}

TEST_CASE("nearest_psd fixes PSD inputs and is idempotent") {
  std::mt19937 rng(13);
  for (int t = 0; t < 20; ++t) {
    const Matrix R = randn(rng, 4, 4);
    const Matrix S = R * R.transpose();
    CHECK((nearest_psd(S) - S).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + S.norm()));

    const Matrix G = randn(rng, 4, 4);
    const Matrix P1 = nearest_psd(G);
    const Matrix P2 = nearest_psd(P1);
    CHECK((P2 - P1).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + P1.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(P1);
    CHECK(eig.eigenvalues()[0] >= -1e-12);
  }
}

TEST_CASE("nearest_psd is no worse than sampled PSD candidates") {
  std::mt19937 rng(17);
  Matrix G = randn(rng, 3, 3);
  G = 0.5 * (G + G.transpose());
  const Matrix P = nearest_psd(G);
  const double best = (P - G).norm();
  for (int t = 0; t < 1000; ++t) {
    const Matrix R = randn(rng, 3, 3);
    const Matrix cand = P + 0.05 * (R * R.transpose());
    CHECK((cand - G).norm() >= best - 1e-12);
  }
}
