#include "vlcsec/matops.hpp"

#include <cmath>
#include <stdexcept>

namespace vlcsec {

Vector vec(const Matrix& X) {
  return Eigen::Map<const Vector>(X.data(), X.size());
}

Matrix unvec(const Vector& x, Eigen::Index rows, Eigen::Index cols) {
  if (x.size() != rows * cols) {
    throw std::invalid_argument("unvec: size mismatch");
  }
  return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

CommutationMatrix::CommutationMatrix(Eigen::Index m, Eigen::Index n)
    : m_(m), n_(n), perm_(static_cast<std::size_t>(m * n)) {
  // vec(X)[c*m + r] = X(r,c); vec(X^T)[r*n + c] = X(r,c)
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      perm_[static_cast<std::size_t>(r * n + c)] = c * m + r;
    }
  }
}

Vector CommutationMatrix::apply(const Vector& x) const {
  if (x.size() != rows()) throw std::invalid_argument("commutation: size mismatch");
  Vector y(rows());
  for (Eigen::Index j = 0; j < rows(); ++j) y[j] = x[perm_[static_cast<std::size_t>(j)]];
  return y;
}

Matrix CommutationMatrix::apply(const Matrix& M) const {
  if (M.rows() != rows()) throw std::invalid_argument("commutation: size mismatch");
  Matrix Y(M.rows(), M.cols());
  for (Eigen::Index j = 0; j < rows(); ++j) {
    Y.row(j) = M.row(perm_[static_cast<std::size_t>(j)]);
  }
  return Y;
}

Matrix CommutationMatrix::dense() const {
  Matrix K = Matrix::Zero(rows(), rows());
  for (Eigen::Index j = 0; j < rows(); ++j) K(j, perm_[static_cast<std::size_t>(j)]) = 1.0;
  return K;
}

Matrix nearest_psd(const Matrix& G) {
  if (G.rows() != G.cols()) throw std::invalid_argument("nearest_psd: not square");
  if (!G.allFinite()) throw std::runtime_error("nearest_psd: non-finite entries");
  const Matrix S = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("nearest_psd: eigendecomposition failed");
  }
  Vector h = eig.eigenvalues();
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (h[i] < 0.0) h[i] = 0.0;
  }
  return eig.eigenvectors() * h.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace vlcsec
