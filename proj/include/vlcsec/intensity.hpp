#pragma once

#include <Eigen/Dense>

namespace vlcsec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Truncated-exponential input model on [-A, A] parameterized by the
// normalized mean alpha = (E + A) / (2A).
struct IntensityProfile {
  double A = 1.0;
  Vector alpha;  // each entry in (0,1)
  Vector mu;     // exponential tilt, mu_i = 0 iff alpha_i = 1/2
  Vector beta;   // alpha - 1/2
  Vector p;      // per-input entropy power, units A^2
  Vector v;      // per-input variance, units A^2
};

// Mean of the normalized truncated exponential: g(mu) = 1/mu - 1/(e^mu - 1).
// Strictly decreasing, g(-inf) = 1, g(0) = 1/2, g(+inf) = 0.
double mean_ratio(double mu);

// Inverts mean_ratio. Returns 0 exactly for alpha_i = 1/2.
double solve_mu(double alpha_i, double tol = 1e-12);

// p_i = 2 A^2 e^{2 alpha mu} / (pi e) * ((1 - e^{-mu}) / mu)^2
double entropy_power_coeff(double A, double alpha_i, double mu_i);

// v_i = A^2 (8/mu^2 - (4 e^{-mu} + 4)/(mu (1 - e^{-mu})) - 4 alpha^2 + 4 alpha)
double variance_coeff(double A, double alpha_i, double mu_i);

IntensityProfile build_profile(double A, const Vector& alpha);

}  // namespace vlcsec
