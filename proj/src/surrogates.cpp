#include "vlcsec/surrogates.hpp"

#include <cmath>
#include <stdexcept>

#include "vlcsec/matops.hpp"

namespace vlcsec {

namespace {

// Symmetric PD inverse via LLT, with a jittered LDLT retry for iterates
// approaching rank deficiency.
Matrix sym_inverse(const Matrix& G) {
  const Eigen::Index n = G.rows();
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() == Eigen::Success) {
    return llt.solve(Matrix::Identity(n, n));
  }
  const double jitter = 1e-12 * std::max(1.0, G.diagonal().cwiseAbs().maxCoeff());
  Eigen::LDLT<Matrix> ldlt(G + jitter * Matrix::Identity(n, n));
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("sym_inverse: Gram matrix not invertible");
  }
  return ldlt.solve(Matrix::Identity(n, n));
}

double logdet_spd(const Matrix& G) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  if (eig.info() != Eigen::Success || eig.eigenvalues()[0] <= 0.0) {
    throw std::runtime_error("logdet_spd: matrix not positive definite");
  }
  return eig.eigenvalues().array().log().sum();
}

// det(Gram)^{1/n} / (1 + scale * det(Gram)^{1/n}) style prefactor pieces.
double nth_root_det(const Matrix& gram, double n) {
  return std::exp(logdet_spd(gram) / n);
}

struct SubParts {
  Matrix HbI, HbIc, HeI, HeIc;
  Vector pI, vI;
};

SubParts sub_parts(const ProblemKind& kind, const WiretapChannel& ch,
                   const IntensityProfile& profile) {
  SubParts s;
  const auto comp = complement_indices(static_cast<int>(ch.nT()), kind.index_set);
  s.HbI = select_columns(ch.Hb, kind.index_set);
  s.HbIc = select_columns(ch.Hb, comp);
  s.HeI = select_columns(ch.He, kind.index_set);
  s.HeIc = select_columns(ch.He, comp);
  const Eigen::Index nB = ch.nB();
  s.pI.resize(nB);
  s.vI.resize(nB);
  for (Eigen::Index j = 0; j < nB; ++j) {
    s.pI[j] = profile.p[kind.index_set[static_cast<std::size_t>(j)]];
    s.vI[j] = profile.v[kind.index_set[static_cast<std::size_t>(j)]];
  }
  return s;
}

void check_shape(const ProblemKind& kind, const Matrix& variable,
                 const WiretapChannel& ch) {
  const auto [r, c] = variable_shape(kind, ch);
  if (variable.rows() != r || variable.cols() != c) {
    throw std::invalid_argument("surrogates: variable shape mismatch");
  }
}

}  // namespace

std::pair<Eigen::Index, Eigen::Index> variable_shape(const ProblemKind& kind,
                                                     const WiretapChannel& ch) {
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI:
    case ProblemKind::Tag::FullCaseII:
      return {ch.nT(), ch.nT()};
    case ProblemKind::Tag::SubCaseI:
      return {ch.nB(), ch.nT() - ch.nB()};
  }
  throw std::logic_error("variable_shape: unknown kind");
}

double objective_fB(const ProblemKind& kind, const Matrix& variable,
                    const WiretapChannel& ch, const IntensityProfile& profile) {
  check_shape(kind, variable, ch);
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI: {
      const Matrix Heq = ch.Hb * variable.transpose();
      return -detail::bob_term_reduced(Heq * profile.p.asDiagonal() *
                                       Heq.transpose());
    }
    case ProblemKind::Tag::SubCaseI: {
      const auto s = sub_parts(kind, ch, profile);
      const Matrix Heq = s.HbI + s.HbIc * variable.transpose();
      return -detail::bob_term_reduced(Heq * s.pI.asDiagonal() *
                                       Heq.transpose());
    }
    case ProblemKind::Tag::FullCaseII: {
      const Eigen::Index nT = ch.nT();
      const Matrix gram =
          variable * ch.Hb.transpose() * ch.Hb * variable.transpose();
      Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
      const Vector& h = eig.eigenvalues();
      const double hmax = h[h.size() - 1];
      if (hmax <= 0.0) return 0.0;
      const double logdet_p = profile.p.array().log().sum() / double(nT);
      double logdet_g = 0.0;
      int r = 0;
      for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (h[i] > kRankTolerance * hmax) {
          logdet_g += std::log(h[i]);
          ++r;
        }
      }
      if (r == 0) return 0.0;
      return -0.5 * r * std::log1p(std::exp(logdet_p + logdet_g / r));
    }
  }
  throw std::logic_error("objective_fB: unknown kind");
}

double objective_fE(const ProblemKind& kind, const Matrix& variable,
                    const WiretapChannel& ch, const IntensityProfile& profile) {
  check_shape(kind, variable, ch);
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI: {
      const Matrix Heq = ch.He * variable.transpose();
      return 0.5 * detail::logdet_psd_plus_identity(
                       Heq * profile.v.asDiagonal() * Heq.transpose());
    }
    case ProblemKind::Tag::SubCaseI: {
      const auto s = sub_parts(kind, ch, profile);
      const Matrix Heq = s.HeI + s.HeIc * variable.transpose();
      return 0.5 * detail::logdet_psd_plus_identity(Heq * s.vI.asDiagonal() *
                                                    Heq.transpose());
    }
    case ProblemKind::Tag::FullCaseII: {
      // |diag(v) W Ge W^T + I| = |v^{1/2} W Ge W^T v^{1/2} + I|
      const Vector sv = profile.v.array().sqrt();
      const Matrix M = sv.asDiagonal() * variable * ch.He.transpose() * ch.He *
                       variable.transpose() * sv.asDiagonal();
      return 0.5 * detail::logdet_psd_plus_identity(M);
    }
  }
  throw std::logic_error("objective_fE: unknown kind");
}

double objective(const ProblemKind& kind, const Matrix& variable,
                 const WiretapChannel& ch, const IntensityProfile& profile) {
  return objective_fB(kind, variable, ch, profile) +
         objective_fE(kind, variable, ch, profile);
}

Matrix grad_fB(const ProblemKind& kind, const Matrix& variable,
               const WiretapChannel& ch, const IntensityProfile& profile) {
  check_shape(kind, variable, ch);
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI: {
      const Matrix Heq = ch.Hb * variable.transpose();
      const Matrix gram = Heq * profile.p.asDiagonal() * Heq.transpose();
      const double t = nth_root_det(gram, double(ch.nB()));
      const Matrix ginv = sym_inverse(gram);
      return -(t / (1.0 + t)) * profile.p.asDiagonal() * variable *
             ch.Hb.transpose() * ginv * ch.Hb;
    }
    case ProblemKind::Tag::SubCaseI: {
      const auto s = sub_parts(kind, ch, profile);
      const Matrix Heq = s.HbI + s.HbIc * variable.transpose();
      const Matrix gram = Heq * s.pI.asDiagonal() * Heq.transpose();
      const double t = nth_root_det(gram, double(ch.nB()));
      const Matrix ginv = sym_inverse(gram);
      return -(t / (1.0 + t)) * s.pI.asDiagonal() * Heq.transpose() * ginv *
             s.HbIc;
    }
    case ProblemKind::Tag::FullCaseII: {
      const Matrix Gb = ch.Hb.transpose() * ch.Hb;
      const Matrix gram = variable * Gb * variable.transpose();
      const double dp =
          std::exp(profile.p.array().log().sum() / double(ch.nT()));
      const double t = dp * nth_root_det(gram, double(ch.nT()));
      const Matrix ginv = sym_inverse(gram);
      return -(t / (1.0 + t)) * ginv * variable * Gb;
    }
  }
  throw std::logic_error("grad_fB: unknown kind");
}

Matrix grad_fE(const ProblemKind& kind, const Matrix& variable,
               const WiretapChannel& ch, const IntensityProfile& profile) {
  check_shape(kind, variable, ch);
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI: {
      const Matrix Heq = ch.He * variable.transpose();
      const Matrix Mk = Heq * profile.v.asDiagonal() * Heq.transpose() +
                        Matrix::Identity(ch.nE(), ch.nE());
      const Matrix Qi = sym_inverse(Mk);
      return profile.v.asDiagonal() * variable * ch.He.transpose() * Qi * ch.He;
    }
    case ProblemKind::Tag::SubCaseI: {
      const auto s = sub_parts(kind, ch, profile);
      const Matrix Heq = s.HeI + s.HeIc * variable.transpose();
      const Matrix Mk = Heq * s.vI.asDiagonal() * Heq.transpose() +
                        Matrix::Identity(ch.nE(), ch.nE());
      const Matrix Qi = sym_inverse(Mk);
      return s.vI.asDiagonal() * Heq.transpose() * Qi * s.HeIc;
    }
    case ProblemKind::Tag::FullCaseII: {
      const Matrix Ge = ch.He.transpose() * ch.He;
      const Matrix D = Matrix(profile.v.asDiagonal());
      const Matrix Mk = D * variable * Ge * variable.transpose() +
                        Matrix::Identity(ch.nT(), ch.nT());
      const Matrix Qi =
          Mk.partialPivLu().solve(Matrix::Identity(ch.nT(), ch.nT()));
      const Matrix QD = Qi * D;
      return 0.5 * (QD + QD.transpose()) * variable * Ge;
    }
  }
  throw std::logic_error("grad_fE: unknown kind");
}

Matrix hessian_fB(const ProblemKind& kind, const Matrix& variable,
                  const WiretapChannel& ch, const IntensityProfile& profile) {
  check_shape(kind, variable, ch);
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI: {
      const Matrix Heq = ch.Hb * variable.transpose();
      const Matrix gram = Heq * profile.p.asDiagonal() * Heq.transpose();
      const Matrix ginv = sym_inverse(gram);
      const Matrix U1 = ch.Hb.transpose() * ginv * ch.Hb;
      const Matrix V1 = profile.p.asDiagonal() * variable * ch.Hb.transpose() *
                        ginv * ch.Hb * variable.transpose() *
                        profile.p.asDiagonal();
      const Matrix O1 = ch.Hb.transpose() * ginv * ch.Hb *
                        variable.transpose() * profile.p.asDiagonal();
      const Matrix V2 = Matrix(profile.p.asDiagonal());
      const CommutationMatrix K(ch.nT(), ch.nT());
      return kron(U1, V1) + K.apply(kron(O1.transpose(), O1)) - kron(U1, V2);
    }
    case ProblemKind::Tag::SubCaseI: {
      const auto s = sub_parts(kind, ch, profile);
      const Matrix Heq = s.HbI + s.HbIc * variable.transpose();
      const Matrix gram = Heq * s.pI.asDiagonal() * Heq.transpose();
      const Matrix ginv = sym_inverse(gram);
      const Matrix U3 = s.HbIc.transpose() * ginv * s.HbIc;
      const Matrix V3 =
          s.pI.asDiagonal() * Heq.transpose() * ginv * Heq * s.pI.asDiagonal();
      const Matrix O2 = s.HbIc.transpose() * ginv * Heq * s.pI.asDiagonal();
      const Matrix V4 = Matrix(s.pI.asDiagonal());
      const CommutationMatrix K(ch.nT() - ch.nB(), ch.nB());
      return kron(U3, V3) + K.apply(kron(O2.transpose(), O2)) - kron(U3, V4);
    }
    case ProblemKind::Tag::FullCaseII: {
      const Matrix Gb = ch.Hb.transpose() * ch.Hb;
      const Matrix gram = variable * Gb * variable.transpose();
      const Matrix ginv = sym_inverse(gram);
      const Matrix U5 = Gb;
      const Matrix V5 = ginv;
      const Matrix O3 = Gb * variable.transpose() * ginv;
      const Matrix U6 = Gb * variable.transpose() * ginv * variable * Gb;
      const CommutationMatrix K(ch.nT(), ch.nT());
      return -kron(U5, V5) + K.apply(kron(O3.transpose(), O3)) + kron(U6, V5);
    }
  }
  throw std::logic_error("hessian_fB: unknown kind");
}

double SurrogateModel::value(const Matrix& variable) const {
  const Vector x = vec(variable);
  return 0.5 * x.dot(P * x) + q.dot(x) + r;
}

SurrogateModel build_surrogate(const ProblemKind& kind, const Matrix& point,
                               const WiretapChannel& ch,
                               const IntensityProfile& profile, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("build_surrogate: tau must be > 0");
  check_shape(kind, point, ch);

  SurrogateModel m;
  m.point = point;
  m.tau = tau;
  m.grad_fB = grad_fB(kind, point, ch, profile);
  m.Ghat = nearest_psd(hessian_fB(kind, point, ch, profile));

  const Eigen::Index n = point.size();
  const Vector xk = vec(point);
  const double fBk = objective_fB(kind, point, ch, profile);

  // Eve half: exact quadratic of the Gram map with the log-det linearized
  // at the expansion point. Q_E is the quadratic coefficient over vec,
  // l_E the linear one, c_E the constant making value-match hold.
  Matrix Q_E;
  Vector l_E = Vector::Zero(n);
  double c_E = 0.0;
  switch (kind.tag) {
    case ProblemKind::Tag::FullCaseI: {
      const Matrix Heq = ch.He * point.transpose();
      const Matrix Mk = Heq * profile.v.asDiagonal() * Heq.transpose() +
                        Matrix::Identity(ch.nE(), ch.nE());
      const Matrix Qi = sym_inverse(Mk);
      const Matrix A = ch.He.transpose() * Qi * ch.He;
      Q_E = kron(A, Matrix(profile.v.asDiagonal()));
      c_E = 0.5 * logdet_spd(Mk) - 0.5 * double(ch.nE()) + 0.5 * Qi.trace();
      break;
    }
    case ProblemKind::Tag::SubCaseI: {
      const auto s = sub_parts(kind, ch, profile);
      const Matrix Heq = s.HeI + s.HeIc * point.transpose();
      const Matrix Mk = Heq * s.vI.asDiagonal() * Heq.transpose() +
                        Matrix::Identity(ch.nE(), ch.nE());
      const Matrix Qi = sym_inverse(Mk);
      const Matrix A = s.HeIc.transpose() * Qi * s.HeIc;
      Q_E = kron(A, Matrix(s.vI.asDiagonal()));
      l_E = vec(Matrix(s.vI.asDiagonal() * s.HeI.transpose() * Qi * s.HeIc));
      c_E = 0.5 * logdet_spd(Mk) - 0.5 * double(ch.nE()) +
            0.5 * ((Qi * (s.HeI * s.vI.asDiagonal() * s.HeI.transpose() +
                          Matrix::Identity(ch.nE(), ch.nE())))
                       .trace());
      break;
    }
    case ProblemKind::Tag::FullCaseII: {
      const Matrix Ge = ch.He.transpose() * ch.He;
      const Matrix D = Matrix(profile.v.asDiagonal());
      const Matrix Mk = D * point * Ge * point.transpose() +
                        Matrix::Identity(ch.nT(), ch.nT());
      // Mk is similar to an SPD matrix; invert via LU.
      const Matrix Qi = Mk.partialPivLu().solve(
          Matrix::Identity(ch.nT(), ch.nT()));
      const Matrix QiD = Qi * D;
      const Matrix raw = kron(Ge, QiD);
      Q_E = 0.5 * (raw + raw.transpose());
      const Vector sv = profile.v.array().sqrt();
      const Matrix Msym = sv.asDiagonal() * point * Ge * point.transpose() *
                              sv.asDiagonal() +
                          Matrix::Identity(ch.nT(), ch.nT());
      c_E = 0.5 * logdet_spd(Msym) - 0.5 * double(ch.nT()) + 0.5 * Qi.trace();
      break;
    }
  }

  const Matrix I = Matrix::Identity(n, n);
  m.P = m.Ghat + tau * I + Q_E;
  m.q = vec(m.grad_fB) + l_E - (m.Ghat + tau * I) * xk;
  m.r = fBk - vec(m.grad_fB).dot(xk) + 0.5 * xk.dot((m.Ghat + tau * I) * xk) +
        c_E;
  return m;
}

}  // namespace vlcsec
