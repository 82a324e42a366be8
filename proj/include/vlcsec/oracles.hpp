#pragma once

#include <Eigen/Dense>
#include <functional>

#include "vlcsec/intensity.hpp"

namespace vlcsec {

// Independent reference implementations used by the validation suite. They
// deliberately avoid the closed forms in the main library: integrals go
// through quadrature, inversions through plain bisection, derivatives
// through finite differences, and QPs through projected gradient ascent.

// Mean parameter of the truncated exponential by bisection on the mean map.
double oracle_solve_mu(double alpha, double tol = 1e-13);

// Entropy power e^{2h(X)} / (2 pi e) of the truncated exponential on [-A, A],
// with h computed by Simpson quadrature of -f log f.
double oracle_entropy_power(double A, double alpha, int panels = 20000);

// Variance by quadrature of the first two moments.
double oracle_variance(double A, double alpha, int panels = 20000);

// Central finite-difference gradient, step h_rel * (1 + |entry|) per entry.
Matrix fd_gradient(const std::function<double(const Matrix&)>& fn,
                   const Matrix& X, double h_rel = 1e-6);

// Box-constrained QP min 1/2 x^T P x + q^T x, lo <= x <= hi, by projected
// gradient with a fixed step below 1/||P||.
Vector oracle_box_qp(const Matrix& P, const Vector& q, const Vector& lo,
                     const Vector& hi, int iters = 200000);

// Inequality/equality constrained QP by projected gradient ascent on the
// dual; P must be PD. Returns the primal reconstruction.
Vector oracle_constrained_qp(const Matrix& P, const Vector& q, const Matrix& A,
                             const Vector& b, const Matrix& E, const Vector& d,
                             int iters = 400000);

// Triple-loop Kronecker product.
Matrix naive_kron(const Matrix& A, const Matrix& B);

}  // namespace vlcsec
