#include "vlcsec/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace vlcsec {

namespace {

double mean_map(double mu) {
  if (mu == 0.0) return 0.5;
  if (std::abs(mu) < 1e-6) {
    return 0.5 - mu / 12.0 + mu * mu * mu / 720.0;
  }
  return 1.0 / mu - 1.0 / std::expm1(mu);
}

// Truncated-exponential density on [-A, A] for mean parameter mu.
double density(double x, double A, double mu) {
  if (mu == 0.0) return 1.0 / (2.0 * A);
  const double c = mu / (-std::expm1(-mu));
  return c / (2.0 * A) * std::exp(-mu * (x + A) / (2.0 * A));
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  }
  return acc * h / 3.0;
}

}  // namespace

double oracle_solve_mu(double alpha, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("oracle_solve_mu: alpha outside (0,1)");
  }
  if (alpha == 0.5) return 0.0;
  double lo = -1.0, hi = 1.0;
  // mean_map is strictly decreasing; expand until the root is bracketed.
  while (mean_map(lo) < alpha) lo *= 2.0;
  while (mean_map(hi) > alpha) hi *= 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mean_map(mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double oracle_entropy_power(double A, double alpha, int panels) {
  const double mu = oracle_solve_mu(alpha);
  const double h = simpson(
      [&](double x) {
        const double f = density(x, A, mu);
        return f > 0.0 ? -f * std::log(f) : 0.0;
      },
      -A, A, panels);
  return std::exp(2.0 * h) / (2.0 * M_PI * M_E);
}

double oracle_variance(double A, double alpha, int panels) {
  const double mu = oracle_solve_mu(alpha);
  const double m1 = simpson(
      [&](double x) { return x * density(x, A, mu); }, -A, A, panels);
  const double m2 = simpson(
      [&](double x) { return x * x * density(x, A, mu); }, -A, A, panels);
  return m2 - m1 * m1;
}

Matrix fd_gradient(const std::function<double(const Matrix&)>& fn,
                   const Matrix& X, double h_rel) {
  Matrix g(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double h = h_rel * (1.0 + std::abs(X(i, j)));
      Matrix Xp = X, Xm = X;
      Xp(i, j) += h;
      Xm(i, j) -= h;
      g(i, j) = (fn(Xp) - fn(Xm)) / (2.0 * h);
    }
  }
  return g;
}

Vector oracle_box_qp(const Matrix& P, const Vector& q, const Vector& lo,
                     const Vector& hi, int iters) {
  const double L = P.operatorNorm();
  const double step = 1.0 / (L + 1e-12);
  Vector x = 0.5 * (lo + hi);
  for (int k = 0; k < iters; ++k) {
    x -= step * (P * x + q);
    x = x.cwiseMax(lo).cwiseMin(hi);
  }
  return x;
}

Vector oracle_constrained_qp(const Matrix& P, const Vector& q, const Matrix& A,
                             const Vector& b, const Matrix& E, const Vector& d,
                             int iters) {
  const Eigen::Index m = A.rows();
  const Eigen::Index p = E.rows();
  const Eigen::LLT<Matrix> llt(P);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("oracle_constrained_qp: P not PD");
  }
  auto primal = [&](const Vector& lam, const Vector& nu) {
    Vector rhs = -q;
    if (m > 0) rhs -= A.transpose() * lam;
    if (p > 0) rhs -= E.transpose() * nu;
    return Vector(llt.solve(rhs));
  };
  // Dual gradient is the constraint violation; Lipschitz bound from the
  // stacked constraint matrix mapped through P^{-1}.
  Matrix C(m + p, q.size());
  if (m > 0) C.topRows(m) = A;
  if (p > 0) C.bottomRows(p) = E;
  const Matrix Pi = llt.solve(Matrix::Identity(q.size(), q.size()));
  const double L = (C * Pi * C.transpose()).operatorNorm();
  const double step = 1.0 / (L + 1e-12);
  Vector lam = Vector::Zero(m), nu = Vector::Zero(p);
  for (int k = 0; k < iters; ++k) {
    const Vector x = primal(lam, nu);
    if (m > 0) lam = (lam + step * (A * x - b)).cwiseMax(0.0);
    if (p > 0) nu += step * (E * x - d);
  }
  return primal(lam, nu);
}

Matrix naive_kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      for (Eigen::Index k = 0; k < B.rows(); ++k) {
        for (Eigen::Index l = 0; l < B.cols(); ++l) {
          K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
        }
      }
    }
  }
  return K;
}

}  // namespace vlcsec
