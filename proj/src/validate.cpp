#include "vlcsec/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "vlcsec/intensity.hpp"
#include "vlcsec/matops.hpp"
#include "vlcsec/oracles.hpp"
#include "vlcsec/qp.hpp"
#include "vlcsec/rates.hpp"
#include "vlcsec/surrogates.hpp"

namespace vlcsec {

namespace {

Matrix randn(std::mt19937& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix M(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = dist(rng);
  }
  return M;
}

CheckResult judge(std::string name, double error, double default_tol,
                  const ValidateOptions& opts) {
  CheckResult res;
  res.name = std::move(name);
  res.error = error;
  res.tol = opts.tol > 0.0 ? opts.tol : default_tol;
  res.pass = std::isfinite(error) && error <= res.tol;
  return res;
}

double gradient_error(const ProblemKind& kind, const WiretapChannel& ch,
                      const IntensityProfile& profile, const Matrix& X,
                      bool perturb) {
  Matrix g = grad_fB(kind, X, ch, profile);
  if (perturb) g.array() += 1e-3;
  const Matrix g_fd = fd_gradient(
      [&](const Matrix& Y) { return objective_fB(kind, Y, ch, profile); }, X);
  return (g - g_fd).cwiseAbs().maxCoeff() / (1.0 + g_fd.cwiseAbs().maxCoeff());
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& opts) {
  std::vector<CheckResult> out;
  const std::vector<double> alphas = {0.1, 0.2, 0.25, 0.3, 0.4,
                                      0.5, 0.6, 0.75, 0.9};

  {
    double err = 0.0;
    for (double a : alphas) {
      err = std::max(err, std::abs(solve_mu(a) - oracle_solve_mu(a)));
    }
    out.push_back(judge("mu-inversion", err, 1e-9, opts));
  }
  {
    double err = 0.0;
    for (double A : {1.0, 3.0}) {
      for (double a : alphas) {
        const double mu = solve_mu(a);
        err = std::max(err, std::abs(entropy_power_coeff(A, a, mu) -
                                     oracle_entropy_power(A, a)));
      }
    }
    out.push_back(judge("entropy-power", err, 1e-8, opts));
  }
  {
    double err = 0.0;
    for (double A : {1.0, 3.0}) {
      for (double a : alphas) {
        const double mu = solve_mu(a);
        err = std::max(err, std::abs(variance_coeff(A, a, mu) -
                                     oracle_variance(A, a)));
      }
    }
    out.push_back(judge("variance", err, 1e-8, opts));
  }

  // Gradient cross-checks on well-conditioned random channels; W near a
  // scaled identity stays inside the feasible region.
  std::mt19937 rng(7);
  {
    const Matrix Hb = Matrix::Ones(2, 4) + 0.3 * randn(rng, 2, 4);
    const Matrix He = 0.3 * Matrix::Ones(2, 4) + 0.1 * randn(rng, 2, 4);
    const auto ch = WiretapChannel::make(Hb, He);
    Vector alpha(4);
    alpha << 0.3, 0.45, 0.5, 0.6;
    const auto profile = build_profile(2.0, alpha);
    const Matrix W = 0.5 * Matrix::Identity(4, 4) + 0.1 * randn(rng, 4, 4);
    out.push_back(judge(
        "gradient-full-case1",
        gradient_error(ProblemKind::full_case1(), ch, profile, W,
                       opts.perturb_gradient),
        1e-5, opts));
    const Matrix B = 0.1 * randn(rng, 2, 2);
    out.push_back(judge(
        "gradient-sub-case1",
        gradient_error(ProblemKind::sub_case1({0, 1}), ch, profile, B,
                       opts.perturb_gradient),
        1e-5, opts));

    // Surrogate: value and slope agree with f at the expansion point, and
    // the quadratic form is at least tau-strongly convex.
    const auto kind = ProblemKind::full_case1();
    const auto m = build_surrogate(kind, W, ch, profile, 1e-5);
    const double f0 = objective(kind, W, ch, profile);
    double err = std::abs(m.value(W) - f0);
    const Matrix g_fd = fd_gradient(
        [&](const Matrix& Y) { return objective(kind, Y, ch, profile); }, W);
    const Vector gs = m.gradient_vec(vec(W));
    err = std::max(err, (gs - vec(g_fd)).cwiseAbs().maxCoeff() /
                            (1.0 + g_fd.cwiseAbs().maxCoeff()));
    out.push_back(judge("surrogate-tangency", err, 1e-4, opts));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m.P);
    const double eigmin = eig.eigenvalues()[0];
    out.push_back(
        judge("surrogate-convexity", std::max(0.0, 0.5e-5 - eigmin), 1e-10,
              opts));
  }
  {
    const Matrix Hb = Matrix::Ones(3, 2) + 0.3 * randn(rng, 3, 2);
    const Matrix He = 0.3 * Matrix::Ones(3, 2) + 0.1 * randn(rng, 3, 2);
    const auto ch = WiretapChannel::make(Hb, He);
    Vector alpha(2);
    alpha << 0.35, 0.55;
    const auto profile = build_profile(1.5, alpha);
    const Matrix W = 0.5 * Matrix::Identity(2, 2) + 0.1 * randn(rng, 2, 2);
    out.push_back(judge(
        "gradient-full-case2",
        gradient_error(ProblemKind::full_case2(), ch, profile, W,
                       opts.perturb_gradient),
        1e-5, opts));
  }

  // QP solver against projected-gradient references.
  {
    const Eigen::Index n = 8;
    const Matrix R = randn(rng, n, n);
    const Matrix P = R * R.transpose() + Matrix::Identity(n, n);
    const Vector q = vec(randn(rng, n, 1));
    const Vector lo = Vector::Constant(n, -1.0), hi = Vector::Constant(n, 1.0);
    QPProblem prob;
    prob.P = P;
    prob.q = q;
    prob.Aineq = Matrix(2 * n, n);
    prob.Aineq.topRows(n) = Matrix::Identity(n, n);
    prob.Aineq.bottomRows(n) = -Matrix::Identity(n, n);
    prob.bineq = Vector(2 * n);
    prob.bineq.head(n) = hi;
    prob.bineq.tail(n) = -lo;
    prob.Aeq = Matrix(0, n);
    prob.beq = Vector();
    const auto sol = solve_qp(prob, 1e-11);
    const Vector ref = oracle_box_qp(P, q, lo, hi);
    const double err = sol.status == QPStatus::Optimal
                           ? (sol.x - ref).cwiseAbs().maxCoeff()
                           : std::numeric_limits<double>::infinity();
    out.push_back(judge("qp-box", err, 1e-6, opts));
  }
  {
    const Eigen::Index n = 6;
    const Matrix R = randn(rng, n, n);
    const Matrix P = R * R.transpose() + Matrix::Identity(n, n);
    const Vector q = vec(randn(rng, n, 1));
    const Matrix A = randn(rng, 4, n);
    const Vector b = Vector::Constant(4, 1.0);
    const Matrix E = randn(rng, 1, n);
    const Vector d = Vector::Constant(1, 0.5);
    QPProblem prob{P, q, 0.0, A, b, E, d};
    const auto sol = solve_qp(prob, 1e-11);
    const Vector ref = oracle_constrained_qp(P, q, A, b, E, d);
    const double err = sol.status == QPStatus::Optimal
                           ? (sol.x - ref).cwiseAbs().maxCoeff()
                           : std::numeric_limits<double>::infinity();
    out.push_back(judge("qp-constrained", err, 1e-5, opts));
  }

  {
    const Matrix A = randn(rng, 3, 4);
    const Matrix B = randn(rng, 2, 5);
    double err = (kron(A, B) - naive_kron(A, B)).cwiseAbs().maxCoeff();
    const Matrix X = randn(rng, 3, 4);
    const CommutationMatrix K(3, 4);
    err = std::max(err,
                   (K.apply(vec(X)) - vec(Matrix(X.transpose())))
                       .cwiseAbs()
                       .maxCoeff());
    out.push_back(judge("kron-commutation", err, 1e-14, opts));
  }

  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace vlcsec
