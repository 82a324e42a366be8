#include "vlcsec/sca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "vlcsec/matops.hpp"

namespace vlcsec {

namespace {

bool submatrix_full_rank(const Matrix& H) {
  Eigen::JacobiSVD<Matrix> svd(H);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return false;
  return s[s.size() - 1] > kRankTolerance * s[0];
}

struct SubChannels {
  Matrix HbI, HbIc, HeI, HeIc;
  Vector betaI, betaIc;
};

SubChannels split_channels(const WiretapChannel& ch,
                           const IntensityProfile& profile,
                           const std::vector<int>& index_set) {
  SubChannels s;
  const auto comp = complement_indices(static_cast<int>(ch.nT()), index_set);
  s.HbI = select_columns(ch.Hb, index_set);
  s.HbIc = select_columns(ch.Hb, comp);
  s.HeI = select_columns(ch.He, index_set);
  s.HeIc = select_columns(ch.He, comp);
  s.betaI.resize(static_cast<Eigen::Index>(index_set.size()));
  for (std::size_t j = 0; j < index_set.size(); ++j) {
    s.betaI[static_cast<Eigen::Index>(j)] = profile.beta[index_set[j]];
  }
  s.betaIc.resize(static_cast<Eigen::Index>(comp.size()));
  for (std::size_t j = 0; j < comp.size(); ++j) {
    s.betaIc[static_cast<Eigen::Index>(j)] = profile.beta[comp[j]];
  }
  return s;
}

// One convexified subproblem: the surrogate quadratic over vec(V) plus the
// epigraph slack block, under the shared inequality rows and optional
// zero-forcing equalities on the V columns.
QPSolution solve_subproblem(const SurrogateModel& m, const ConstraintBlock& blk,
                            const Matrix& Aeq_v, const Vector& beq,
                            double qp_tol) {
  const Eigen::Index nv = blk.n_var;
  const Eigen::Index n = nv + blk.n_slack;
  QPProblem prob;
  prob.P = 1e-10 * Matrix::Identity(n, n);
  prob.P.topLeftCorner(nv, nv) += m.P;
  prob.q = Vector::Zero(n);
  prob.q.head(nv) = m.q;
  prob.r = m.r;
  prob.Aineq = blk.Aineq;
  prob.bineq = blk.bineq;
  if (Aeq_v.rows() > 0) {
    prob.Aeq = Matrix::Zero(Aeq_v.rows(), n);
    prob.Aeq.leftCols(nv) = Aeq_v;
    prob.beq = beq;
  } else {
    prob.Aeq = Matrix(0, n);
    prob.beq = Vector();
  }
  return solve_qp(prob, qp_tol);
}

// Largest point on the segment [anchor, target] whose constraint violation
// is at most tol.  The violation is convex along the segment and the anchor
// satisfies it, so bisection applies.  Used to keep iterates feasible to
// well below the reporting tolerance regardless of the QP's primal residual.
Matrix pull_feasible(const Matrix& anchor, const Matrix& target,
                     const std::function<double(const Matrix&)>& residual,
                     double tol) {
  if (residual(target) <= tol) return target;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Matrix Xm = anchor + mid * (target - anchor);
    (residual(Xm) <= tol ? lo : hi) = mid;
  }
  return anchor + lo * (target - anchor);
}

struct LoopResult {
  Matrix X;
  Termination termination = Termination::MaxIters;
  int iterations = 0;
  double objective = 0.0;
  bool infeasible = false;
  std::vector<double> feasibility_trace;
};

LoopResult sca_loop(const ProblemKind& kind, const WiretapChannel& ch,
                    const IntensityProfile& profile, const ConstraintBlock& blk,
                    const Matrix& Aeq_v, const Vector& beq, const Matrix& X0,
                    const SCAConfig& cfg,
                    const std::function<double(const Matrix&)>& residual) {
  LoopResult out;
  out.X = X0;
  if (X0.size() == 0) {
    // Degenerate variable (nT == nB sub-connected): nothing to optimize.
    out.objective = objective(kind, X0, ch, profile);
    out.termination = Termination::StepSize;
    return out;
  }

  double f = objective(kind, out.X, ch, profile);
  double gamma = cfg.gamma0;
  Matrix Xprev = out.X;
  constexpr double kFeasTol = 1e-10;
  for (int k = 0; k < cfg.max_iters; ++k) {
    SurrogateModel m;
    try {
      m = build_surrogate(kind, out.X, ch, profile, cfg.tau);
    } catch (const std::runtime_error&) {
      // Gram collapse at the current iterate; nudge once and retry.
      const Matrix jittered =
          out.X + 1e-8 * Matrix::Ones(out.X.rows(), out.X.cols());
      try {
        m = build_surrogate(kind, jittered, ch, profile, cfg.tau);
        out.X = jittered;
        f = objective(kind, out.X, ch, profile);
      } catch (const std::runtime_error&) {
        out.termination = Termination::MaxIters;
        out.objective = f;
        return out;
      }
    }

    const auto sol = solve_subproblem(m, blk, Aeq_v, beq, cfg.qp_tol);
    out.iterations = k + 1;
    if (sol.status == QPStatus::Infeasible) {
      out.infeasible = true;
      out.objective = f;
      return out;
    }
    const Matrix Xhat = unvec(sol.x.head(blk.n_var), X0.rows(), X0.cols());
    Matrix Xnew = out.X + gamma * (Xhat - out.X);
    if (residual) Xnew = pull_feasible(out.X, Xnew, residual, kFeasTol);
    double fnew = objective(kind, Xnew, ch, profile);

    // Safeguarded momentum.  The quadratic model is myopic inside the
    // narrow curved valleys that open up at high intensity, so the damped
    // update alone can need thousands of iterations; extrapolating along
    // the accumulated move while the objective keeps decreasing and the
    // iterate stays feasible recovers fast termination without touching
    // the base update.  Affine extrapolation through two feasible iterates
    // preserves any nulling equalities exactly.
    if (residual) {
      for (double omega = 16.0; omega >= 0.5; omega *= 0.5) {
        const Matrix Xc = Xnew + omega * (Xnew - Xprev);
        if (residual(Xc) > kFeasTol) continue;
        double fc;
        try {
          fc = objective(kind, Xc, ch, profile);
        } catch (const std::runtime_error&) {
          continue;
        }
        if (std::isfinite(fc) && fc < fnew) {
          Xnew = Xc;
          fnew = fc;
          break;
        }
      }
    }

    const double step = (Xnew - out.X).norm();
    const double df = std::abs(fnew - f);
    Xprev = out.X;
    out.X = Xnew;
    if (residual) out.feasibility_trace.push_back(residual(Xnew));
    f = fnew;
    gamma = gamma * (1.0 - cfg.gamma_decay * gamma);
    if (step <= cfg.tol_step) {
      out.termination = Termination::StepSize;
      out.objective = f;
      return out;
    }
    if (df <= cfg.tol_obj) {
      out.termination = Termination::ObjectiveChange;
      out.objective = f;
      return out;
    }
  }
  out.termination = Termination::MaxIters;
  out.objective = f;
  return out;
}

SecrecyRate rate_from_objective(double f) {
  SecrecyRate r;
  r.raw = -f;
  r.clamped = std::max(0.0, r.raw);
  return r;
}

}  // namespace

std::vector<std::vector<int>> enumerate_index_sets(const WiretapChannel& ch,
                                                   int cap) {
  const int nT = static_cast<int>(ch.nT());
  const int nB = static_cast<int>(ch.nB());
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(nB));
  for (int i = 0; i < nB; ++i) idx[static_cast<std::size_t>(i)] = i;
  int examined = 0;
  while (true) {
    if (++examined > cap) break;
    if (submatrix_full_rank(select_columns(ch.Hb, idx))) out.push_back(idx);
    // next lexicographic combination
    int i = nB - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == nT - nB + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < nB; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Vector recover_bias_full(const Matrix& W, const Vector& beta) {
  if (W.rows() != beta.size() || W.cols() != beta.size()) {
    throw std::invalid_argument("recover_bias_full: shape mismatch");
  }
  Vector d(W.cols());
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    d[j] = 2.0 * (beta[j] - W.col(j).dot(beta));
  }
  return d;
}

Vector recover_bias_sub(const Matrix& B, const Vector& beta_I,
                        const Vector& beta_Ic) {
  if (B.rows() != beta_I.size() || B.cols() != beta_Ic.size()) {
    throw std::invalid_argument("recover_bias_sub: shape mismatch");
  }
  Vector c(B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    c[j] = 2.0 * (beta_Ic[j] - B.col(j).dot(beta_I));
  }
  return c;
}

SCARun run_full(const WiretapChannel& ch, const IntensityProfile& profile,
                bool zero_forcing, const SCAConfig& cfg) {
  if (ch.kase != ChannelCase::CaseI) {
    throw std::invalid_argument("run_full: channel is not Case I");
  }
  const Eigen::Index nT = ch.nT();
  const Eigen::Index nB = ch.nB();
  Matrix W0 = Matrix::Zero(nT, nT);
  W0.topLeftCorner(nB, nB) = Matrix::Identity(nB, nB);

  const auto blk = compile_full_constraints(profile.beta);
  Matrix Aeq(0, 0);
  Vector beq;
  if (zero_forcing) {
    Aeq = zf_equalities_full(ch.He);
    beq = Vector::Zero(Aeq.rows());
  }
  const auto kind = ProblemKind::full_case1();
  const auto loop = sca_loop(kind, ch, profile, blk, Aeq, beq, W0, cfg,
                             [&](const Matrix& X) {
                               return feasibility_residual_full(X, profile.beta);
                             });

  SCARun run;
  run.variable = loop.X;
  run.bias = recover_bias_full(loop.X, profile.beta);
  run.rate = rate_from_objective(loop.objective);
  run.termination =
      loop.infeasible ? Termination::AllZFInfeasible : loop.termination;
  run.iterations = loop.iterations;
  run.objective = loop.objective;
  run.feasibility_residual = feasibility_residual_full(loop.X, profile.beta);
  run.zf_residual = zero_forcing ? (ch.He * loop.X.transpose()).norm() : 0.0;
  run.feasibility_trace = loop.feasibility_trace;
  return run;
}

SCARun run_sub(const WiretapChannel& ch, const IntensityProfile& profile,
               bool zero_forcing, const SCAConfig& cfg) {
  if (ch.kase != ChannelCase::CaseI) {
    throw std::invalid_argument("run_sub: channel is not Case I");
  }
  const auto sets = enumerate_index_sets(ch);
  if (sets.empty()) {
    throw std::runtime_error("run_sub: no nonsingular index set");
  }
  SCARun best;
  bool have_best = false;
  int zf_skipped = 0;
  for (const auto& I : sets) {
    const auto s = split_channels(ch, profile, I);
    const auto blk = compile_sub_constraints(s.betaI, s.betaIc);
    Matrix Aeq(0, 0);
    Vector beq;
    if (zero_forcing) {
      auto [A, rhs] = zf_equalities_sub(s.HeI, s.HeIc);
      Aeq = std::move(A);
      beq = std::move(rhs);
      // Inconsistent targets cannot be forced to zero; skip this set.
      if (Aeq.rows() > 0) {
        const Vector ls =
            Aeq.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(beq);
        if ((Aeq * ls - beq).cwiseAbs().maxCoeff() >
            1e-8 * (1.0 + beq.cwiseAbs().maxCoeff())) {
          ++zf_skipped;
          continue;
        }
      }
    }
    const Matrix B0 =
        Matrix::Zero(ch.nB(), ch.nT() - ch.nB());
    const auto kind = ProblemKind::sub_case1(I);
    const auto loop = sca_loop(kind, ch, profile, blk, Aeq, beq, B0, cfg,
                               [&](const Matrix& X) {
                                 return feasibility_residual_sub(X, s.betaI,
                                                                 s.betaIc);
                               });
    if (loop.infeasible) {
      ++zf_skipped;
      continue;
    }
    SCARun cand;
    cand.variable = loop.X;
    cand.bias = recover_bias_sub(loop.X, s.betaI, s.betaIc);
    cand.index_set = I;
    cand.rate = rate_from_objective(loop.objective);
    cand.termination = loop.termination;
    cand.iterations = loop.iterations;
    cand.objective = loop.objective;
    cand.feasibility_residual =
        feasibility_residual_sub(loop.X, s.betaI, s.betaIc);
    cand.feasibility_trace = loop.feasibility_trace;
    cand.zf_residual =
        zero_forcing ? (s.HeI + s.HeIc * loop.X.transpose()).norm() : 0.0;
    if (!have_best || cand.rate.raw > best.rate.raw) {
      best = cand;
      have_best = true;
    }
  }
  if (!have_best) {
    SCARun run;
    run.termination = Termination::AllZFInfeasible;
    return run;
  }
  (void)zf_skipped;
  return best;
}

SCARun run_sub_mlse(const WiretapChannel& ch, const IntensityProfile& profile,
                    const SCAConfig& cfg) {
  if (ch.kase != ChannelCase::CaseI) {
    throw std::invalid_argument("run_sub_mlse: channel is not Case I");
  }
  const auto sets = enumerate_index_sets(ch);
  if (sets.empty()) {
    throw std::runtime_error("run_sub_mlse: no nonsingular index set");
  }
  SCARun best;
  bool have_best = false;
  for (const auto& I : sets) {
    const auto s = split_channels(ch, profile, I);
    const auto sol = solve_mlse(s.HeI, s.HeIc, s.betaI, s.betaIc, cfg.qp_tol);
    if (sol.status == QPStatus::Infeasible) continue;
    const Eigen::Index nv = s.betaI.size() * s.betaIc.size();
    const Matrix B = unvec(sol.x.head(nv), ch.nB(), ch.nT() - ch.nB());
    const double resid = (s.HeI + s.HeIc * B.transpose()).norm();
    if (have_best && resid >= best.zf_residual) continue;

    SCARun cand;
    cand.variable = B;
    cand.bias = recover_bias_sub(B, s.betaI, s.betaIc);
    cand.index_set = I;
    const auto kind = ProblemKind::sub_case1(I);
    cand.objective = objective(kind, B, ch, profile);
    cand.rate = rate_from_objective(cand.objective);
    cand.termination = Termination::StepSize;
    cand.iterations = sol.iterations;
    cand.feasibility_residual = feasibility_residual_sub(B, s.betaI, s.betaIc);
    cand.zf_residual = resid;
    best = cand;
    have_best = true;
  }
  if (!have_best) {
    SCARun run;
    run.termination = Termination::AllZFInfeasible;
    return run;
  }
  return best;
}

SCARun run_case2(const WiretapChannel& ch, const IntensityProfile& profile,
                 const SCAConfig& cfg) {
  if (ch.kase != ChannelCase::CaseII) {
    throw std::invalid_argument("run_case2: channel is not Case II");
  }
  const Eigen::Index nT = ch.nT();
  const Matrix W0 = Matrix::Identity(nT, nT);
  const auto blk = compile_full_constraints(profile.beta);
  const auto kind = ProblemKind::full_case2();
  const auto loop =
      sca_loop(kind, ch, profile, blk, Matrix(0, 0), Vector(), W0, cfg,
               [&](const Matrix& X) {
                 return feasibility_residual_full(X, profile.beta);
               });

  SCARun run;
  run.variable = loop.X;
  run.bias = recover_bias_full(loop.X, profile.beta);
  run.rate = rate_from_objective(loop.objective);
  run.termination = loop.termination;
  run.iterations = loop.iterations;
  run.objective = loop.objective;
  run.feasibility_residual = feasibility_residual_full(loop.X, profile.beta);
  run.zf_residual = 0.0;
  run.feasibility_trace = loop.feasibility_trace;
  return run;
}

}  // namespace vlcsec
