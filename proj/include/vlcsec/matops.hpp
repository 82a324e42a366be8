#pragma once

#include <Eigen/Dense>
#include <vector>

namespace vlcsec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Column-major stacking.
Vector vec(const Matrix& X);
Matrix unvec(const Vector& x, Eigen::Index rows, Eigen::Index cols);

Matrix kron(const Matrix& A, const Matrix& B);

// Permutation K with K vec(X) = vec(X^T) for all m x n matrices X.
// Stored as an index map; dense form only materialized on request.
class CommutationMatrix {
 public:
  CommutationMatrix(Eigen::Index m, Eigen::Index n);

  Eigen::Index rows() const { return static_cast<Eigen::Index>(perm_.size()); }
  Vector apply(const Vector& x) const;
  // left-multiplies: K * M
  Matrix apply(const Matrix& M) const;
  Matrix dense() const;

 private:
  Eigen::Index m_, n_;
  std::vector<Eigen::Index> perm_;  // out[j] = in[perm_[j]]
};

// Frobenius-nearest PSD matrix: symmetrize, then clip negative eigenvalues.
Matrix nearest_psd(const Matrix& G);

}  // namespace vlcsec
