#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vlcsec/intensity.hpp"
#include "vlcsec/rates.hpp"

namespace vlcsec {

// Which beamforming objective family is being optimized. FullCaseI covers
// the fully-connected Case-I problems (plain and ZF), SubCaseI the
// sub-connected ones, FullCaseII the Case-II fully-connected problem.
struct ProblemKind {
  enum class Tag { FullCaseI, SubCaseI, FullCaseII };
  Tag tag = Tag::FullCaseI;
  std::vector<int> index_set;  // SubCaseI only

  static ProblemKind full_case1() { return {Tag::FullCaseI, {}}; }
  static ProblemKind sub_case1(std::vector<int> idx) {
    return {Tag::SubCaseI, std::move(idx)};
  }
  static ProblemKind full_case2() { return {Tag::FullCaseII, {}}; }
};

// Shape of the matrix variable for a kind: W is nT x nT, B is nB x (nT - nB).
std::pair<Eigen::Index, Eigen::Index> variable_shape(const ProblemKind& kind,
                                                     const WiretapChannel& ch);

// f = f_B + f_E = -(achievable secrecy rate of the equivalent channel).
double objective(const ProblemKind& kind, const Matrix& variable,
                 const WiretapChannel& ch, const IntensityProfile& profile);
double objective_fB(const ProblemKind& kind, const Matrix& variable,
                    const WiretapChannel& ch, const IntensityProfile& profile);
double objective_fE(const ProblemKind& kind, const Matrix& variable,
                    const WiretapChannel& ch, const IntensityProfile& profile);

// Closed-form gradients, same shape as the variable.
Matrix grad_fB(const ProblemKind& kind, const Matrix& variable,
               const WiretapChannel& ch, const IntensityProfile& profile);
Matrix grad_fE(const ProblemKind& kind, const Matrix& variable,
               const WiretapChannel& ch, const IntensityProfile& profile);

// Kronecker-structured Hessian of f_B, raw (unprojected), side = #entries.
Matrix hessian_fB(const ProblemKind& kind, const Matrix& variable,
                  const WiretapChannel& ch, const IntensityProfile& profile);

// Strongly convex local model f~(x) = 1/2 x^T P x + q^T x + r over
// x = vec(variable), matching f in value and gradient at the expansion
// point, with Hessian >= tau * I.
struct SurrogateModel {
  Matrix point;     // expansion point
  Matrix grad_fB;   // Bob gradient at the point
  Matrix Ghat;      // PSD-projected Bob Hessian
  double tau = 1e-5;

  Matrix P;
  Vector q;
  double r = 0.0;

  double value(const Matrix& variable) const;
  Vector gradient_vec(const Vector& x) const { return P * x + q; }
};

SurrogateModel build_surrogate(const ProblemKind& kind, const Matrix& point,
                               const WiretapChannel& ch,
                               const IntensityProfile& profile, double tau);

}  // namespace vlcsec
