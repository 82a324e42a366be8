#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "vlcsec/matops.hpp"
#include "vlcsec/oracles.hpp"
#include "vlcsec/qp.hpp"
#include "vlcsec/rates.hpp"
#include "vlcsec/scenario.hpp"
#include "vlcsec/surrogates.hpp"

using namespace vlcsec;
using testutil::randn;

namespace {

WiretapChannel case1_channel() {
  const auto sc = preset_scenario("group2");
  return WiretapChannel::make(sc.Hb, sc.He);
}

WiretapChannel case2_channel() {
  const auto sc = preset_scenario("group2-case2");
  return WiretapChannel::make(sc.Hb, sc.He);
}

}  // namespace

TEST_CASE("objective agrees with the rate evaluation") {
  const auto ch = case1_channel();
  const auto prof = build_profile(2.0, Vector::Constant(4, 0.3));

  const double f_ident = objective(ProblemKind::full_case1(),
                                   Matrix::Identity(4, 4), ch, prof);
  CHECK(f_ident ==
        doctest::Approx(-secrecy_rate_case1(ch.Hb, ch.He, prof).raw)
            .epsilon(1e-12));

  // zero sub-connected variable leaves only the selected columns active
  const std::vector<int> I = {0, 1};
  const double f_sub =
      objective(ProblemKind::sub_case1(I), Matrix::Zero(2, 2), ch, prof);
  const auto prof_sub = build_profile(2.0, Vector::Constant(2, 0.3));
  CHECK(f_sub ==
        doctest::Approx(-secrecy_rate_case1(ch.Hb.leftCols(2),
                                            ch.He.leftCols(2), prof_sub)
                             .raw)
            .epsilon(1e-12));

  std::mt19937 rng(37);
  const auto ch2 = case2_channel();
  const auto prof2 = build_profile(2.0, Vector::Constant(2, 0.3));
  const Matrix W = 0.5 * Matrix::Identity(2, 2) + 0.1 * randn(rng, 2, 2);
  auto [Hbw, Hew] = apply_full_beamformer(ch2.Hb, ch2.He, W);
  CHECK(objective(ProblemKind::full_case2(), W, ch2, prof2) ==
        doctest::Approx(
            -secrecy_rate_case2(Hbw, Hew, prof2, RankPolicy::Reduce).raw)
            .epsilon(1e-12));
}

TEST_CASE("objective splits into Bob and Eve halves") {
  const auto ch = case1_channel();
  const auto prof = build_profile(1.5, Vector::Constant(4, 0.4));
  std::mt19937 rng(41);
  const Matrix W = 0.5 * Matrix::Identity(4, 4) + 0.05 * randn(rng, 4, 4);
  const auto kind = ProblemKind::full_case1();
  CHECK(objective(kind, W, ch, prof) ==
        doctest::Approx(objective_fB(kind, W, ch, prof) +
                        objective_fE(kind, W, ch, prof))
            .epsilon(1e-12));
}

TEST_CASE("scalar gradient reduction") {
  // single-aperture network: f_B(w) = -1/2 log(1 + h^2 p w^2)
  const double h = 0.9, w = 0.6;
  const auto ch = WiretapChannel::make(Matrix::Constant(1, 1, h),
                                       Matrix::Constant(1, 1, 0.2));
  const auto prof = build_profile(1.0, Vector::Constant(1, 0.3));
  const double p = prof.p[0];
  const double expect = -h * h * p * w / (1.0 + h * h * p * w * w);
  const Matrix g = grad_fB(ProblemKind::full_case1(),
                           Matrix::Constant(1, 1, w), ch, prof);
  CHECK(g(0, 0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradients match finite differences") {
  std::mt19937 rng(43);
  const auto prof = build_profile(2.0, Vector::Constant(4, 0.3));

  SUBCASE("fully connected") {
    const auto ch = case1_channel();
    const auto kind = ProblemKind::full_case1();
    for (int t = 0; t < 5; ++t) {
      const Matrix W = 0.5 * Matrix::Identity(4, 4) + 0.05 * randn(rng, 4, 4);
      const Matrix g = grad_fB(kind, W, ch, prof);
      const Matrix gfd = fd_gradient(
          [&](const Matrix& X) { return objective_fB(kind, X, ch, prof); }, W);
      CHECK((g - gfd).cwiseAbs().maxCoeff() /
                (1.0 + gfd.cwiseAbs().maxCoeff()) < 1e-5);
    }
  }
  SUBCASE("sub connected") {
    const auto ch = case1_channel();
    const auto kind = ProblemKind::sub_case1({0, 1});
    for (int t = 0; t < 5; ++t) {
      const Matrix B = 0.2 * randn(rng, 2, 2);
      const Matrix g = grad_fB(kind, B, ch, prof);
      const Matrix gfd = fd_gradient(
          [&](const Matrix& X) { return objective_fB(kind, X, ch, prof); }, B);
      CHECK((g - gfd).cwiseAbs().maxCoeff() /
                (1.0 + gfd.cwiseAbs().maxCoeff()) < 1e-5);
    }
  }
  SUBCASE("transposed regime") {
    const auto ch = case2_channel();
    const auto prof2 = build_profile(2.0, Vector::Constant(2, 0.3));
    const auto kind = ProblemKind::full_case2();
    for (int t = 0; t < 5; ++t) {
      const Matrix W = 0.6 * Matrix::Identity(2, 2) + 0.05 * randn(rng, 2, 2);
      const Matrix g = grad_fB(kind, W, ch, prof2);
      const Matrix gfd = fd_gradient(
          [&](const Matrix& X) { return objective_fB(kind, X, ch, prof2); },
          W);
      CHECK((g - gfd).cwiseAbs().maxCoeff() /
                (1.0 + gfd.cwiseAbs().maxCoeff()) < 1e-5);
    }
  }
  SUBCASE("eavesdropper half") {
    const auto ch = case1_channel();
    const auto kind = ProblemKind::full_case1();
    const Matrix W = 0.5 * Matrix::Identity(4, 4) + 0.05 * randn(rng, 4, 4);
    const Matrix g = grad_fE(kind, W, ch, prof);
    const Matrix gfd = fd_gradient(
        [&](const Matrix& X) { return objective_fE(kind, X, ch, prof); }, W);
    CHECK((g - gfd).cwiseAbs().maxCoeff() /
              (1.0 + gfd.cwiseAbs().maxCoeff()) < 1e-5);
  }
}

TEST_CASE("Hessian assembly matches the determinant-core curvature") {
  // The assembled matrix is the Hessian of the log-determinant core
  // c(W) = -1/2 log|Hb W diag(p) W^T Hb^T|, without the +1 shift.  With a
  // single receiver the core is an explicit scalar log, so central
  // differences give an independent oracle for all three Kronecker terms.
  std::mt19937 rng(47);
  Matrix Hb = testutil::random_channel(rng, 1, 2);
  Matrix He = testutil::random_channel(rng, 1, 2, 0.3, 0.1);
  const auto ch = WiretapChannel::make(Hb, He);
  const auto prof = build_profile(1.5, Vector::Constant(2, 0.4));
  const Matrix W = 0.5 * Matrix::Identity(2, 2) + 0.1 * randn(rng, 2, 2);

  const Matrix H = hessian_fB(ProblemKind::full_case1(), W, ch, prof);
  REQUIRE(H.rows() == 4);
  REQUIRE(H.cols() == 4);

  const auto core = [&](const Matrix& X) {
    const Matrix heq = ch.Hb * X.transpose();
    return -0.5 * std::log(
                      (heq * prof.p.asDiagonal() * heq.transpose())(0, 0));
  };
  const Eigen::Index n = 4;
  Matrix J(n, n);
  const double h = 1e-4;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Matrix Wpp = W, Wpm = W, Wmp = W, Wmm = W;
      Wpp.data()[i] += h;
      Wpp.data()[j] += h;
      Wpm.data()[i] += h;
      Wpm.data()[j] -= h;
      Wmp.data()[i] -= h;
      Wmp.data()[j] += h;
      Wmm.data()[i] -= h;
      Wmm.data()[j] -= h;
      J(i, j) = (core(Wpp) - core(Wpm) - core(Wmp) + core(Wmm)) /
                (4.0 * h * h);
    }
  }
  const Matrix Hs = 0.5 * (H + H.transpose());
  CHECK((Hs - J).cwiseAbs().maxCoeff() < 1e-4 * (1.0 + J.norm()));
}

TEST_CASE("scalar sub-connected Hessian") {
  // B is 1x1: the Kronecker expression collapses to hIc^2 / (hI + hIc b)^2
  std::mt19937 rng(53);
  Matrix Hb = testutil::random_channel(rng, 1, 2);
  Matrix He = testutil::random_channel(rng, 1, 2, 0.3, 0.1);
  const auto ch = WiretapChannel::make(Hb, He);
  const auto prof = build_profile(1.0, Vector::Constant(2, 0.4));
  const auto kind = ProblemKind::sub_case1({0});
  const double b = 0.3;
  const Matrix H = hessian_fB(kind, Matrix::Constant(1, 1, b), ch, prof);
  REQUIRE(H.rows() == 1);
  const double heq = Hb(0, 0) + Hb(0, 1) * b;
  CHECK(H(0, 0) ==
        doctest::Approx(Hb(0, 1) * Hb(0, 1) / (heq * heq)).epsilon(1e-10));
}

TEST_CASE("surrogate tangency and strong convexity") {
  std::mt19937 rng(59);
  const double tau = 1e-5;

  const auto check_model = [&](const ProblemKind& kind,
                               const WiretapChannel& ch,
                               const IntensityProfile& prof, const Matrix& X) {
    const auto m = build_surrogate(kind, X, ch, prof, tau);
    const double f0 = objective(kind, X, ch, prof);
    CHECK(std::abs(m.value(X) - f0) < 1e-10 * (1.0 + std::abs(f0)));

    const Vector gs = m.gradient_vec(vec(X));
    const Vector ga = vec(Matrix(grad_fB(kind, X, ch, prof) +
                                 grad_fE(kind, X, ch, prof)));
    CHECK((gs - ga).cwiseAbs().maxCoeff() <
          1e-8 * (1.0 + ga.cwiseAbs().maxCoeff()));

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m.P);
    CHECK(eig.eigenvalues()[0] >= 0.5 * tau - 1e-10);
  };

  const auto ch = case1_channel();
  const auto prof = build_profile(2.0, Vector::Constant(4, 0.3));
  for (int t = 0; t < 5; ++t) {
    check_model(ProblemKind::full_case1(), ch, prof,
                0.5 * Matrix::Identity(4, 4) + 0.05 * randn(rng, 4, 4));
    check_model(ProblemKind::sub_case1({0, 1}), ch, prof,
                0.2 * randn(rng, 2, 2));
  }
  const auto ch2 = case2_channel();
  const auto prof2 = build_profile(2.0, Vector::Constant(2, 0.3));
  for (int t = 0; t < 5; ++t) {
    check_model(ProblemKind::full_case2(), ch2, prof2,
                0.6 * Matrix::Identity(2, 2) + 0.05 * randn(rng, 2, 2));
  }
}

TEST_CASE("surrogate gradient also matches finite differences of the model") {
  std::mt19937 rng(61);
  const auto ch = case1_channel();
  const auto prof = build_profile(1.0, Vector::Constant(4, 0.3));
  const Matrix W = 0.5 * Matrix::Identity(4, 4) + 0.05 * randn(rng, 4, 4);
  const auto m = build_surrogate(ProblemKind::full_case1(), W, ch, prof, 1e-5);
  const Matrix gfd =
      fd_gradient([&](const Matrix& X) { return m.value(X); }, W);
  CHECK((m.gradient_vec(vec(W)) - vec(gfd)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("variable shapes per kind") {
  const auto ch = case1_channel();
  auto [r1, c1] = variable_shape(ProblemKind::full_case1(), ch);
  CHECK(r1 == 4);
  CHECK(c1 == 4);
  auto [r2, c2] = variable_shape(ProblemKind::sub_case1({0, 1}), ch);
  CHECK(r2 == 2);
  CHECK(c2 == 2);
  const auto ch2 = case2_channel();
  auto [r3, c3] = variable_shape(ProblemKind::full_case2(), ch2);
  CHECK(r3 == 2);
  CHECK(c3 == 2);
}

TEST_CASE("build_surrogate rejects nonpositive tau") {
  const auto ch = case1_channel();
  const auto prof = build_profile(1.0, Vector::Constant(4, 0.3));
  CHECK_THROWS(build_surrogate(ProblemKind::full_case1(),
                               Matrix::Identity(4, 4), ch, prof, 0.0));
}
