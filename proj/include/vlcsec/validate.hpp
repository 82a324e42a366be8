#pragma once

#include <string>
#include <vector>

namespace vlcsec {

struct CheckResult {
  std::string name;
  bool pass = false;
  double error = 0.0;  // worst measured discrepancy
  double tol = 0.0;    // threshold it was judged against
};

struct ValidateOptions {
  // Overrides every check's default threshold when positive.
  double tol = -1.0;
  // Negative control: biases the analytic gradients before comparison, so
  // the gradient checks must fail. Exercised by the test suite to prove the
  // checks can fail at all.
  bool perturb_gradient = false;
};

// Cross-checks the closed-form implementations against quadrature,
// bisection, finite differences and projected-gradient references.
std::vector<CheckResult> run_validation(const ValidateOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace vlcsec
