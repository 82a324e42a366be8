#include "vlcsec/intensity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vlcsec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;
// Below this |mu| the closed forms are evaluated by series to avoid 0/0.
constexpr double kSeriesThreshold = 1e-4;

// (1 - e^{-mu}) / mu, series-guarded near zero.
double one_minus_exp_over(double mu) {
  if (std::abs(mu) < kSeriesThreshold) {
    return 1.0 - mu / 2.0 + mu * mu / 6.0 - mu * mu * mu / 24.0 +
           mu * mu * mu * mu / 120.0;
  }
  return -std::expm1(-mu) / mu;
}

}  // namespace

double mean_ratio(double mu) {
  if (std::abs(mu) < kSeriesThreshold) {
    // 1/mu - 1/(e^mu - 1) = 1/2 - mu/12 + mu^3/720 - mu^5/30240 + ...
    const double m2 = mu * mu;
    return 0.5 - mu / 12.0 + mu * m2 / 720.0 - mu * m2 * m2 / 30240.0;
  }
  return 1.0 / mu - 1.0 / std::expm1(mu);
}

double solve_mu(double alpha_i, double tol) {
  if (!(alpha_i > 0.0 && alpha_i < 1.0)) {
    throw std::domain_error("solve_mu: alpha must lie in (0,1), got " +
                            std::to_string(alpha_i));
  }
  if (tol <= 0.0) throw std::domain_error("solve_mu: tol must be positive");
  if (alpha_i == 0.5) return 0.0;

  // g is strictly decreasing; expand [-1,1] geometrically to bracket.
  double lo = -1.0, hi = 1.0;
  while (mean_ratio(lo) < alpha_i) lo *= 2.0;
  while (mean_ratio(hi) > alpha_i) hi *= 2.0;

  // Bisection to tol, then one Newton polish.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mean_ratio(mid) > alpha_i) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double mu = 0.5 * (lo + hi);
  // g'(mu) = -1/mu^2 + e^mu/(e^mu - 1)^2
  const double em1 = std::expm1(mu);
  const double gp = -1.0 / (mu * mu) + std::exp(mu) / (em1 * em1);
  if (std::isfinite(gp) && gp != 0.0) {
    mu -= (mean_ratio(mu) - alpha_i) / gp;
  }
  return mu;
}

double entropy_power_coeff(double A, double alpha_i, double mu_i) {
  if (A <= 0.0) throw std::domain_error("entropy_power_coeff: A must be > 0");
  const double ratio = one_minus_exp_over(mu_i);
  return 2.0 * A * A * std::exp(2.0 * alpha_i * mu_i) / (kPi * kE) * ratio *
         ratio;
}

double variance_coeff(double A, double alpha_i, double mu_i) {
  if (A <= 0.0) throw std::domain_error("variance_coeff: A must be > 0");
  double core;
  if (std::abs(mu_i) < kSeriesThreshold) {
    // 8/mu^2 - 4 coth(mu/2)/mu = -2/3 + mu^2/90 - mu^4/3780 + ...
    const double m2 = mu_i * mu_i;
    core = -2.0 / 3.0 + m2 / 90.0 - m2 * m2 / 3780.0;
  } else {
    core = 8.0 / (mu_i * mu_i) -
           (4.0 * std::exp(-mu_i) + 4.0) / (mu_i * (-std::expm1(-mu_i)));
  }
  return A * A * (core - 4.0 * alpha_i * alpha_i + 4.0 * alpha_i);
}

IntensityProfile build_profile(double A, const Vector& alpha) {
  if (A <= 0.0) throw std::domain_error("build_profile: A must be > 0");
  const Eigen::Index n = alpha.size();
  IntensityProfile prof;
  prof.A = A;
  prof.alpha = alpha;
  prof.mu.resize(n);
  prof.beta.resize(n);
  prof.p.resize(n);
  prof.v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(alpha[i] > 0.0 && alpha[i] < 1.0)) {
      throw std::domain_error("build_profile: alpha[" + std::to_string(i) +
                              "] = " + std::to_string(alpha[i]) +
                              " outside (0,1)");
    }
    prof.mu[i] = solve_mu(alpha[i]);
    prof.beta[i] = alpha[i] - 0.5;
    prof.p[i] = entropy_power_coeff(A, alpha[i], prof.mu[i]);
    prof.v[i] = variance_coeff(A, alpha[i], prof.mu[i]);
  }
  return prof;
}

}  // namespace vlcsec
