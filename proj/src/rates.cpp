#include "vlcsec/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlcsec {

namespace {

bool full_rank(const Matrix& H) {
  Eigen::JacobiSVD<Matrix> svd(H);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return false;
  return s[s.size() - 1] > kRankTolerance * s[0];
}

}  // namespace

namespace detail {

// (r/2) log(1 + pdet^{1/r}) over the effective rank r of the PSD Gram G.
double bob_term_reduced(const Matrix& G) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("bob term: eigendecomposition failed");
  }
  const Vector& h = eig.eigenvalues();
  const double hmax = h[h.size() - 1];
  if (hmax <= 0.0) return 0.0;
  double logdet = 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (h[i] > kRankTolerance * hmax) {
      logdet += std::log(h[i]);
      ++r;
    }
  }
  if (r == 0) return 0.0;
  return 0.5 * r * std::log1p(std::exp(logdet / r));
}

double logdet_psd_plus_identity(const Matrix& G) {
  // G symmetric PSD; |G + I| via eigenvalues.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("logdet: eigendecomposition failed");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    acc += std::log1p(std::max(eig.eigenvalues()[i], 0.0));
  }
  return acc;
}

}  // namespace detail

namespace {

SecrecyRate make_rate(double raw) {
  SecrecyRate r;
  r.raw = raw;
  r.clamped = std::max(0.0, raw);
  return r;
}

}  // namespace

ChannelCase classify_case(Eigen::Index nT, Eigen::Index nB, Eigen::Index nE) {
  if (nT < 1 || nB < 1 || nE < 1) {
    throw std::invalid_argument("classify_case: dimensions must be >= 1");
  }
  if (nT >= nB && nT >= nE) return ChannelCase::CaseI;
  if (nT < nB && nT < nE) return ChannelCase::CaseII;
  return ChannelCase::Unsupported;
}

WiretapChannel WiretapChannel::make(Matrix Hb, Matrix He) {
  if (Hb.cols() != He.cols()) {
    throw std::invalid_argument("WiretapChannel: Hb and He column mismatch");
  }
  if (!full_rank(Hb)) throw std::invalid_argument("WiretapChannel: Hb rank-deficient");
  if (!full_rank(He)) throw std::invalid_argument("WiretapChannel: He rank-deficient");
  WiretapChannel ch;
  ch.kase = classify_case(Hb.cols(), Hb.rows(), He.rows());
  ch.Hb = std::move(Hb);
  ch.He = std::move(He);
  return ch;
}

SecrecyRate secrecy_rate_case1(const Matrix& Hb, const Matrix& He,
                               const IntensityProfile& profile,
                               RankPolicy policy) {
  const Eigen::Index nT = Hb.cols();
  const Eigen::Index nB = Hb.rows();
  if (profile.p.size() != nT) {
    throw std::invalid_argument("secrecy_rate_case1: profile length mismatch");
  }
  if (classify_case(nT, nB, He.rows()) != ChannelCase::CaseI) {
    throw std::invalid_argument("secrecy_rate_case1: channel is not Case I");
  }
  const Matrix Gb = Hb * profile.p.asDiagonal() * Hb.transpose();
  if (policy == RankPolicy::Strict) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Gb);
    const Vector& h = eig.eigenvalues();
    if (h[h.size() - 1] <= 0.0 || h[0] <= kRankTolerance * h[h.size() - 1]) {
      throw std::runtime_error("secrecy_rate_case1: singular Bob Gram matrix");
    }
  }
  const double bob = detail::bob_term_reduced(Gb);
  const Matrix Ge = He * profile.v.asDiagonal() * He.transpose();
  const double eve = 0.5 * detail::logdet_psd_plus_identity(Ge);
  return make_rate(bob - eve);
}

SecrecyRate secrecy_rate_case2(const Matrix& Hb, const Matrix& He,
                               const IntensityProfile& profile,
                               RankPolicy policy) {
  const Eigen::Index nT = Hb.cols();
  const Eigen::Index nB = Hb.rows();
  if (profile.p.size() != nT) {
    throw std::invalid_argument("secrecy_rate_case2: profile length mismatch");
  }
  if (classify_case(nT, nB, He.rows()) != ChannelCase::CaseII) {
    throw std::invalid_argument("secrecy_rate_case2: channel is not Case II");
  }
  const Matrix Gb = Hb.transpose() * Hb;  // nT x nT
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Gb);
  const Vector& h = eig.eigenvalues();
  const double hmax = h[h.size() - 1];
  if (policy == RankPolicy::Strict &&
      (hmax <= 0.0 || h[0] <= kRankTolerance * hmax)) {
    throw std::runtime_error("secrecy_rate_case2: singular Hb^T Hb");
  }
  // |diag(p)|^{1/nT} stays over all nT inputs; the Gram determinant drops
  // to the effective-rank pseudo-determinant when reduced.
  const double logdet_p = profile.p.array().log().sum() / double(nT);
  double bob = 0.0;
  if (hmax > 0.0) {
    double logdet_g = 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      if (h[i] > kRankTolerance * hmax) {
        logdet_g += std::log(h[i]);
        ++r;
      }
    }
    if (r > 0) {
      bob = 0.5 * r * std::log1p(std::exp(logdet_p + logdet_g / r));
    }
  }
  // |diag(v) He^T He + I| = |v^{1/2} He^T He v^{1/2} + I| (Sylvester).
  const Vector sv = profile.v.array().sqrt();
  const Matrix Ge = sv.asDiagonal() * (He.transpose() * He) * sv.asDiagonal();
  const double eve = 0.5 * detail::logdet_psd_plus_identity(Ge);
  return make_rate(bob - eve);
}

std::pair<Matrix, Matrix> apply_full_beamformer(const Matrix& Hb,
                                                const Matrix& He,
                                                const Matrix& W) {
  if (W.rows() != Hb.cols() || W.cols() != Hb.cols()) {
    throw std::invalid_argument("apply_full_beamformer: W must be nT x nT");
  }
  return {Hb * W.transpose(), He * W.transpose()};
}

Matrix select_columns(const Matrix& H, const std::vector<int>& idx) {
  Matrix out(H.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] < 0 || idx[j] >= H.cols()) {
      throw std::out_of_range("select_columns: index out of range");
    }
    out.col(static_cast<Eigen::Index>(j)) = H.col(idx[j]);
  }
  return out;
}

std::vector<int> complement_indices(int nT, const std::vector<int>& index_set) {
  std::vector<bool> in(static_cast<std::size_t>(nT), false);
  for (int i : index_set) in[static_cast<std::size_t>(i)] = true;
  std::vector<int> comp;
  for (int i = 0; i < nT; ++i) {
    if (!in[static_cast<std::size_t>(i)]) comp.push_back(i);
  }
  return comp;
}

std::pair<Matrix, Matrix> apply_sub_beamformer(const Matrix& Hb,
                                               const Matrix& He,
                                               const std::vector<int>& index_set,
                                               const Matrix& B) {
  const Eigen::Index nB = Hb.rows();
  const int nT = static_cast<int>(Hb.cols());
  if (static_cast<Eigen::Index>(index_set.size()) != nB) {
    throw std::invalid_argument("apply_sub_beamformer: |I| must equal nB");
  }
  const Matrix HbI = select_columns(Hb, index_set);
  if (!full_rank(HbI)) {
    throw std::invalid_argument("apply_sub_beamformer: Hb_I singular");
  }
  const auto comp = complement_indices(nT, index_set);
  if (B.rows() != nB || B.cols() != static_cast<Eigen::Index>(comp.size())) {
    throw std::invalid_argument("apply_sub_beamformer: B must be nB x (nT - nB)");
  }
  const Matrix HbIc = select_columns(Hb, comp);
  const Matrix HeI = select_columns(He, index_set);
  const Matrix HeIc = select_columns(He, comp);
  return {HbI + HbIc * B.transpose(), HeI + HeIc * B.transpose()};
}

}  // namespace vlcsec
