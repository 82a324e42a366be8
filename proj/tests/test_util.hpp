#pragma once

#include <random>

#include "vlcsec/intensity.hpp"

namespace vlcsec::testutil {

inline Matrix randn(std::mt19937& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix M(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) M(i, j) = dist(rng);
  }
  return M;
}

// Positive, well-conditioned channel matrix in the style of the measured
// presets: entries around `base` with mild spread.
inline Matrix random_channel(std::mt19937& rng, Eigen::Index r, Eigen::Index c,
                             double base = 1.0, double spread = 0.3) {
  Matrix M = Matrix::Constant(r, c, base) + spread * randn(rng, r, c);
  return M.cwiseAbs();
}

// Scales a candidate beamformer until every column satisfies the l1 budget
// and the bias range with margin. Keeps the point strictly interior.
template <typename Residual>
inline Matrix shrink_feasible(Matrix X, const Residual& residual) {
  for (int i = 0; i < 60 && residual(X) > 0.0; ++i) X *= 0.8;
  return X;
}

}  // namespace vlcsec::testutil
