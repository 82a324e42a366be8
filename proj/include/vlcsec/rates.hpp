#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "vlcsec/intensity.hpp"

namespace vlcsec {

enum class ChannelCase { CaseI, CaseII, Unsupported };

ChannelCase classify_case(Eigen::Index nT, Eigen::Index nB, Eigen::Index nE);

// Bob/Eve channel matrices, dimensionless (xi = 1, sigma = 1).
struct WiretapChannel {
  Matrix Hb;  // nB x nT
  Matrix He;  // nE x nT
  ChannelCase kase = ChannelCase::Unsupported;

  Eigen::Index nT() const { return Hb.cols(); }
  Eigen::Index nB() const { return Hb.rows(); }
  Eigen::Index nE() const { return He.rows(); }

  // Validates full rank of both matrices and classifies the case.
  static WiretapChannel make(Matrix Hb, Matrix He);
};

struct SecrecyRate {
  double raw = 0.0;
  double clamped = 0.0;
};

// Singular values below this times the largest count as zero.
constexpr double kRankTolerance = 1e-10;

// Rank handling for the Bob term of beamformed equivalent channels:
// Strict throws on a singular Bob Gram, Reduce evaluates over the
// effective-rank row space so optimizer objectives stay finite.
enum class RankPolicy { Strict, Reduce };

// Case I rate: (nB/2) log(1 + |Hb diag(p) Hb^T|^{1/nB})
//              - (1/2) log |He diag(v) He^T + I|.
// Natural log; convert at the reporting layer.
SecrecyRate secrecy_rate_case1(const Matrix& Hb, const Matrix& He,
                               const IntensityProfile& profile,
                               RankPolicy policy = RankPolicy::Strict);

// Case II rate: (nT/2) log(1 + |diag(p)|^{1/nT} |Hb^T Hb|^{1/nT})
//               - (1/2) log |diag(v) He^T He + I|.
SecrecyRate secrecy_rate_case2(const Matrix& Hb, const Matrix& He,
                               const IntensityProfile& profile,
                               RankPolicy policy = RankPolicy::Strict);

// Equivalent channels under W: (Hb W^T, He W^T).
std::pair<Matrix, Matrix> apply_full_beamformer(const Matrix& Hb,
                                                const Matrix& He,
                                                const Matrix& W);

// Equivalent channels under (I, B): (Hb_I + Hb_Ic B^T, He_I + He_Ic B^T).
// Throws if the columns of Hb indexed by I form a singular submatrix.
std::pair<Matrix, Matrix> apply_sub_beamformer(const Matrix& Hb,
                                               const Matrix& He,
                                               const std::vector<int>& index_set,
                                               const Matrix& B);

Matrix select_columns(const Matrix& H, const std::vector<int>& idx);
std::vector<int> complement_indices(int nT, const std::vector<int>& index_set);

namespace detail {
// (r/2) log(1 + pdet(G)^{1/r}) over the effective rank r of a PSD Gram G.
double bob_term_reduced(const Matrix& gram);
// log |G + I| for symmetric PSD G, eigenvalue route.
double logdet_psd_plus_identity(const Matrix& gram);
}  // namespace detail

}  // namespace vlcsec
