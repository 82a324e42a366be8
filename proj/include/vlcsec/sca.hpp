#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vlcsec/qp.hpp"
#include "vlcsec/rates.hpp"
#include "vlcsec/surrogates.hpp"

namespace vlcsec {

struct SCAConfig {
  double tau = 1e-5;         // surrogate convexity floor
  double gamma0 = 1.0;       // initial step size
  double gamma_decay = 1e-2; // gamma_{k+1} = gamma_k (1 - decay * gamma_k)
  double tol_step = 1e-6;    // ||X^{k+1} - X^k||_F threshold
  double tol_obj = 1e-6;     // |f^{k+1} - f^k| threshold
  int max_iters = 500;
  double qp_tol = 1e-8;
};

enum class Termination { StepSize, ObjectiveChange, MaxIters, AllZFInfeasible };

struct SCARun {
  Matrix variable;            // optimized W or B
  Vector bias;                // DC offsets recovered from the beamformer
  std::vector<int> index_set; // sub-connected winner, empty otherwise
  SecrecyRate rate;           // in nats
  Termination termination = Termination::MaxIters;
  int iterations = 0;
  double feasibility_residual = 0.0;
  double zf_residual = 0.0;   // ||He,eq||_F of the final point (ZF/MLSE runs)
  double objective = 0.0;     // final f = f_B + f_E (negated rate, nats)
  // Constraint violation of each iterate after the first update; the first
  // step lands on a subproblem solution, later ones are convex combinations,
  // so every entry should be solver-tolerance small.
  std::vector<double> feasibility_trace;
};

// All size-nB index subsets whose Bob submatrix is nonsingular,
// lexicographic order, capped at `cap` candidates before filtering.
std::vector<std::vector<int>> enumerate_index_sets(const WiretapChannel& ch,
                                                   int cap = 5000);

// d_j = 2 (beta_j - w_j^T beta) for full W; c_j = 2 (beta_Icj - b_j^T beta_I).
Vector recover_bias_full(const Matrix& W, const Vector& beta);
Vector recover_bias_sub(const Matrix& B, const Vector& beta_I,
                        const Vector& beta_Ic);

// Fully connected Case I, optionally under the zero-forcing equalities.
SCARun run_full(const WiretapChannel& ch, const IntensityProfile& profile,
                bool zero_forcing, const SCAConfig& cfg = {});

// Sub-connected Case I: loops admissible index sets, keeps the best rate,
// ties broken toward the lexicographically smallest set.
SCARun run_sub(const WiretapChannel& ch, const IntensityProfile& profile,
               bool zero_forcing, const SCAConfig& cfg = {});

// Sub-connected leakage minimization: one convex solve per index set,
// winner has the smallest residual ||He_Ic B^T + He_I||_F.
SCARun run_sub_mlse(const WiretapChannel& ch, const IntensityProfile& profile,
                    const SCAConfig& cfg = {});

// Fully connected Case II.
SCARun run_case2(const WiretapChannel& ch, const IntensityProfile& profile,
                 const SCAConfig& cfg = {});

}  // namespace vlcsec
