#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "vlcsec/intensity.hpp"

namespace vlcsec {

// Standard-form convex QP:
//   minimize   1/2 x^T P x + q^T x + r
//   subject to Aineq x <= bineq, Aeq x = beq.
// P must be symmetric PSD (strictly PD after the caller's regularization).
struct QPProblem {
  Matrix P;
  Vector q;
  double r = 0.0;
  Matrix Aineq;
  Vector bineq;
  Matrix Aeq;   // 0 x n when absent
  Vector beq;
};

enum class QPStatus { Optimal, Infeasible, MaxIters };

struct QPSolution {
  Vector x;
  QPStatus status = QPStatus::MaxIters;
  double objective = 0.0;
  double primal_residual = 0.0;  // max equality/inequality violation
  double dual_residual = 0.0;    // stationarity residual norm
  double gap = 0.0;              // complementarity measure
  int iterations = 0;
};

// Inequality rows over the stacked variable [vec(V); vec(S)] where V is the
// beamformer block (column length m, ncols columns) and S carries the
// epigraph slacks s_ij >= |v_ij|. Per column j:
//   v_ij - s_ij <= 0,  -v_ij - s_ij <= 0          (absolute-value slabs)
//   sum_i s_ij <= 1                               (l1 budget)
//   +-(v_j^T betaCol - betaOff_j) + 1/2 sum_i s_ij <= 1/2   (bias range)
struct ConstraintBlock {
  Matrix Aineq;
  Vector bineq;
  Eigen::Index n_var = 0;    // size of the V block
  Eigen::Index n_slack = 0;  // size of the S block
};

// Fully connected W (nT x nT): betaCol = betaOff = beta, beta_i = alpha_i - 1/2.
ConstraintBlock compile_full_constraints(const Vector& beta);

// Sub-connected B (nB x (nT - nB)): column weights beta_I, offsets beta_Ic.
ConstraintBlock compile_sub_constraints(const Vector& beta_I,
                                        const Vector& beta_Ic);

// Zero-forcing equalities on the V block only (caller pads the S columns).
// Full: He W^T = 0 as (I ⊗ He) K vec(W) = 0.
Matrix zf_equalities_full(const Matrix& He);
// Sub: He_Ic B^T = -He_I; returns {A, rhs} with A vec(B) = rhs.
std::pair<Matrix, Vector> zf_equalities_sub(const Matrix& He_I,
                                            const Matrix& He_Ic);

// Dense primal-dual interior-point solve (Mehrotra predictor-corrector),
// deterministic. Classifies inconsistent/infeasible constraint systems as
// Infeasible via a least-squares pre-check and a phase-1 relaxation.
QPSolution solve_qp(const QPProblem& prob, double tol = 1e-8,
                    int max_iters = 200);

// Leakage minimization for an index set: minimize ||He_Ic B^T + He_I||_F^2
// under the sub-connected constraints. Returns the solution over
// [vec(B); vec(S)] plus the attained residual in `objective`.
QPSolution solve_mlse(const Matrix& He_I, const Matrix& He_Ic,
                      const Vector& beta_I, const Vector& beta_Ic,
                      double tol = 1e-8);

// Max violation of the original (slack-free) constraint set; zero when
// feasible. Used for reporting, not inside the solver.
double feasibility_residual_full(const Matrix& W, const Vector& beta);
double feasibility_residual_sub(const Matrix& B, const Vector& beta_I,
                                const Vector& beta_Ic);

}  // namespace vlcsec
