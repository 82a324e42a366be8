#include "vlcsec/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlcsec/matops.hpp"

namespace vlcsec {

namespace {

// Shared layout for the full and sub-connected constraint sets: the variable
// block has `ncols` columns of length `m`, each paired with a slack column.
ConstraintBlock build_block(Eigen::Index m, Eigen::Index ncols,
                            const Vector& betaCol, const Vector& betaOff) {
  if (betaCol.size() != m || betaOff.size() != ncols) {
    throw std::invalid_argument("constraints: beta length mismatch");
  }
  ConstraintBlock blk;
  blk.n_var = m * ncols;
  blk.n_slack = m * ncols;
  const Eigen::Index rows_per_col = 2 * m + 3;
  const Eigen::Index n = blk.n_var + blk.n_slack;
  blk.Aineq = Matrix::Zero(rows_per_col * ncols, n);
  blk.bineq = Vector::Zero(rows_per_col * ncols);
  for (Eigen::Index j = 0; j < ncols; ++j) {
    const Eigen::Index row0 = j * rows_per_col;
    const Eigen::Index v0 = j * m;             // column j of V in vec order
    const Eigen::Index s0 = blk.n_var + j * m; // matching slack column
    for (Eigen::Index i = 0; i < m; ++i) {
      blk.Aineq(row0 + 2 * i, v0 + i) = 1.0;
      blk.Aineq(row0 + 2 * i, s0 + i) = -1.0;
      blk.Aineq(row0 + 2 * i + 1, v0 + i) = -1.0;
      blk.Aineq(row0 + 2 * i + 1, s0 + i) = -1.0;
    }
    const Eigen::Index rsum = row0 + 2 * m;
    blk.Aineq.row(rsum).segment(s0, m).setOnes();
    blk.bineq[rsum] = 1.0;
    // v_j^T betaCol - betaOff_j in [-(1/2 - ||v_j||_1 / 2), ...]
    const Eigen::Index rp = rsum + 1;
    const Eigen::Index rn = rsum + 2;
    blk.Aineq.row(rp).segment(v0, m) = betaCol.transpose();
    blk.Aineq.row(rn).segment(v0, m) = -betaCol.transpose();
    blk.Aineq.row(rp).segment(s0, m).setConstant(0.5);
    blk.Aineq.row(rn).segment(s0, m).setConstant(0.5);
    blk.bineq[rp] = 0.5 + betaOff[j];
    blk.bineq[rn] = 0.5 - betaOff[j];
  }
  return blk;
}

double column_violation(const Vector& col, const Vector& betaCol,
                        double betaOff) {
  const double l1 = col.cwiseAbs().sum();
  double viol = std::max(0.0, l1 - 1.0);
  const double bias = col.dot(betaCol) - betaOff;
  viol = std::max(viol, std::abs(bias) - (0.5 - 0.5 * l1));
  return std::max(0.0, viol);
}

struct IPMResult {
  Vector x;
  QPStatus status = QPStatus::MaxIters;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// Infeasible-start Mehrotra predictor-corrector for
//   min 1/2 x^T P x + q^T x  s.t.  A x + s = b, s >= 0, E x = d.
// Slacks and inequality multipliers are eliminated; each step solves the
// bordered system [P + A^T diag(lam/s) A, E^T; E, 0].
IPMResult ipm_core(const Matrix& P, const Vector& q, const Matrix& A,
                   const Vector& b, const Matrix& E, const Vector& d,
                   double tol, int max_iters) {
  const Eigen::Index n = q.size();
  const Eigen::Index m = A.rows();
  const Eigen::Index p = E.rows();
  IPMResult res;

  if (m == 0) {
    // Pure equality-constrained QP, direct KKT solve.
    Matrix K = Matrix::Zero(n + p, n + p);
    K.topLeftCorner(n, n) = P;
    if (p > 0) {
      K.topRightCorner(n, p) = E.transpose();
      K.bottomLeftCorner(p, n) = E;
    }
    Vector rhs(n + p);
    rhs.head(n) = -q;
    if (p > 0) rhs.tail(p) = d;
    const Vector sol = K.fullPivLu().solve(rhs);
    res.x = sol.head(n);
    res.status = QPStatus::Optimal;
    res.dual_residual = (P * res.x + q +
                         (p > 0 ? Vector(E.transpose() * sol.tail(p))
                                : Vector(Vector::Zero(n))))
                            .norm();
    res.primal_residual = p > 0 ? (E * res.x - d).cwiseAbs().maxCoeff() : 0.0;
    res.iterations = 1;
    return res;
  }

  const double scale =
      1.0 + std::max({q.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(),
                      p > 0 ? d.cwiseAbs().maxCoeff() : 0.0,
                      P.cwiseAbs().maxCoeff()});

  Vector x = Vector::Zero(n);
  if (p > 0) {
    x = E.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(d);
  }
  Vector s(m), lam(m);
  const Vector slack0 = b - A * x;
  for (Eigen::Index i = 0; i < m; ++i) {
    s[i] = std::max(1.0, slack0[i]);
    lam[i] = 1.0;
  }
  Vector nu = Vector::Zero(p);

  for (int it = 1; it <= max_iters; ++it) {
    const Vector r_d =
        P * x + q + A.transpose() * lam + (p > 0 ? Vector(E.transpose() * nu)
                                                 : Vector(Vector::Zero(n)));
    const Vector r_p = A * x + s - b;
    const Vector r_e = p > 0 ? Vector(E * x - d) : Vector();
    const double mu = s.dot(lam) / double(m);

    res.dual_residual = r_d.norm();
    res.primal_residual =
        std::max(r_p.cwiseAbs().maxCoeff(),
                 p > 0 ? r_e.cwiseAbs().maxCoeff() : 0.0);
    res.gap = mu;
    res.iterations = it;

    if (res.dual_residual <= tol * scale &&
        res.primal_residual <= tol * scale && mu <= tol * scale) {
      res.x = x;
      res.status = QPStatus::Optimal;
      return res;
    }

    const Vector w = lam.cwiseQuotient(s);  // diag scaling lam / s
    Matrix H = P;
    H.noalias() += A.transpose() * w.asDiagonal() * A;

    Matrix K = Matrix::Zero(n + p, n + p);
    K.topLeftCorner(n, n) = H;
    if (p > 0) {
      K.topRightCorner(n, p) = E.transpose();
      K.bottomLeftCorner(p, n) = E;
    }
    Eigen::FullPivLU<Matrix> lu(K);

    auto solve_step = [&](const Vector& r_c) {
      // r_c is the complementarity target: s o lam - (corrections).
      const Vector tmp = (-r_c).cwiseQuotient(s) + w.cwiseProduct(r_p);
      Vector rhs(n + p);
      rhs.head(n) = -r_d - A.transpose() * tmp;
      if (p > 0) rhs.tail(p) = -r_e;
      const Vector sol = lu.solve(rhs);
      struct Step {
        Vector dx, ds, dlam, dnu;
      } st;
      st.dx = sol.head(n);
      st.dnu = p > 0 ? Vector(sol.tail(p)) : Vector();
      st.ds = -r_p - A * st.dx;
      st.dlam = (-r_c).cwiseQuotient(s) - w.cwiseProduct(st.ds);
      return st;
    };

    auto max_step = [&](const Vector& z, const Vector& dz) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (dz[i] < 0.0) a = std::min(a, -z[i] / dz[i]);
      }
      return a;
    };

    // Affine (predictor) direction.
    const auto aff = solve_step(s.cwiseProduct(lam));
    const double ap_aff = max_step(s, aff.ds);
    const double ad_aff = max_step(lam, aff.dlam);
    const double mu_aff = (s + ap_aff * aff.ds).dot(lam + ad_aff * aff.dlam) /
                          double(m);
    const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);

    // Corrected direction.
    const Vector r_c = s.cwiseProduct(lam) + aff.ds.cwiseProduct(aff.dlam) -
                       Vector::Constant(m, sigma * mu);
    const auto st = solve_step(r_c);
    const double ap = std::min(1.0, 0.99 * max_step(s, st.ds));
    const double ad = std::min(1.0, 0.99 * max_step(lam, st.dlam));

    x += ap * st.dx;
    s += ap * st.ds;
    lam += ad * st.dlam;
    if (p > 0) nu += ad * st.dnu;
  }

  res.x = x;
  res.status = QPStatus::MaxIters;
  return res;
}

// Phase-1 relaxation: min 1/2 delta (||x||^2 + t^2) + t with
// A x - t 1 <= b, E x = d. Strictly feasible for large t, so the IPM
// converges; t* materially above zero certifies inequality infeasibility.
double phase1_infeasibility(const Matrix& A, const Vector& b, const Matrix& E,
                            const Vector& d, double tol) {
  const Eigen::Index n = A.cols();
  const Eigen::Index m = A.rows();
  const Eigen::Index p = E.rows();
  const double delta = 1e-8;

  Matrix P = delta * Matrix::Identity(n + 1, n + 1);
  Vector q = Vector::Zero(n + 1);
  q[n] = 1.0;
  Matrix A1(m, n + 1);
  A1.leftCols(n) = A;
  A1.col(n).setConstant(-1.0);
  Matrix E1 = Matrix::Zero(p, n + 1);
  if (p > 0) E1.leftCols(n) = E;

  const auto res = ipm_core(P, q, A1, b, E1, d, std::max(tol, 1e-9), 300);
  if (res.status != QPStatus::Optimal) {
    // Could not certify either way; report the best t found.
    return res.x.size() > 0 ? res.x[n] : 1.0;
  }
  return res.x[n];
}

}  // namespace

ConstraintBlock compile_full_constraints(const Vector& beta) {
  const Eigen::Index nT = beta.size();
  return build_block(nT, nT, beta, beta);
}

ConstraintBlock compile_sub_constraints(const Vector& beta_I,
                                        const Vector& beta_Ic) {
  return build_block(beta_I.size(), beta_Ic.size(), beta_I, beta_Ic);
}

Matrix zf_equalities_full(const Matrix& He) {
  const Eigen::Index nT = He.cols();
  const CommutationMatrix K(nT, nT);
  return kron(Matrix::Identity(nT, nT), He) * K.dense();
}

std::pair<Matrix, Vector> zf_equalities_sub(const Matrix& He_I,
                                            const Matrix& He_Ic) {
  const Eigen::Index nB = He_I.cols();
  const Eigen::Index nc = He_Ic.cols();
  const CommutationMatrix K(nB, nc);
  Matrix A = kron(Matrix::Identity(nB, nB), He_Ic) * K.dense();
  return {std::move(A), -vec(He_I)};
}

QPSolution solve_qp(const QPProblem& prob, double tol, int max_iters) {
  const Eigen::Index n = prob.q.size();
  if (prob.P.rows() != n || prob.P.cols() != n) {
    throw std::invalid_argument("solve_qp: P/q dimension mismatch");
  }
  const Matrix& E = prob.Aeq;
  QPSolution sol;

  // Inconsistent equality systems never reach the interior-point loop.
  if (E.rows() > 0) {
    const Vector xls =
        E.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(prob.beq);
    const double resid = (E * xls - prob.beq).cwiseAbs().maxCoeff();
    const double sc = 1.0 + prob.beq.cwiseAbs().maxCoeff();
    if (resid > 1e-8 * sc) {
      sol.x = Vector::Zero(n);
      sol.status = QPStatus::Infeasible;
      sol.primal_residual = resid;
      return sol;
    }
  }

  auto res = ipm_core(prob.P, prob.q, prob.Aineq, prob.bineq, E, prob.beq, tol,
                      max_iters);
  if (res.status != QPStatus::Optimal && prob.Aineq.rows() > 0) {
    const double t = phase1_infeasibility(prob.Aineq, prob.bineq, E, prob.beq,
                                          tol);
    if (t > 1e-6) res.status = QPStatus::Infeasible;
  }

  sol.x = res.x;
  sol.status = res.status;
  sol.primal_residual = res.primal_residual;
  sol.dual_residual = res.dual_residual;
  sol.gap = res.gap;
  sol.iterations = res.iterations;
  sol.objective = 0.5 * sol.x.dot(prob.P * sol.x) + prob.q.dot(sol.x) + prob.r;
  return sol;
}

QPSolution solve_mlse(const Matrix& He_I, const Matrix& He_Ic,
                      const Vector& beta_I, const Vector& beta_Ic,
                      double tol) {
  const auto blk = compile_sub_constraints(beta_I, beta_Ic);
  const Eigen::Index n = blk.n_var + blk.n_slack;
  const auto [M, rhs] = zf_equalities_sub(He_I, He_Ic);
  // ||M vec(B) - rhs||^2 expanded; tiny ridge keeps the slack block PD.
  QPProblem prob;
  prob.P = 1e-10 * Matrix::Identity(n, n);
  prob.P.topLeftCorner(blk.n_var, blk.n_var) += 2.0 * M.transpose() * M;
  prob.q = Vector::Zero(n);
  prob.q.head(blk.n_var) = -2.0 * M.transpose() * rhs;
  prob.r = rhs.squaredNorm();
  prob.Aineq = blk.Aineq;
  prob.bineq = blk.bineq;
  prob.Aeq = Matrix(0, n);
  prob.beq = Vector();
  return solve_qp(prob, tol);
}

double feasibility_residual_full(const Matrix& W, const Vector& beta) {
  if (W.rows() != beta.size() || W.cols() != beta.size()) {
    throw std::invalid_argument("feasibility_residual_full: shape mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    worst = std::max(worst, column_violation(W.col(j), beta, beta[j]));
  }
  return worst;
}

double feasibility_residual_sub(const Matrix& B, const Vector& beta_I,
                                const Vector& beta_Ic) {
  if (B.rows() != beta_I.size() || B.cols() != beta_Ic.size()) {
    throw std::invalid_argument("feasibility_residual_sub: shape mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    worst = std::max(worst, column_violation(B.col(j), beta_I, beta_Ic[j]));
  }
  return worst;
}

}  // namespace vlcsec
