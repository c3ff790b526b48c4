#pragma once

#include <span>
#include <utility>

namespace relik {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t distribution with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;  // two-sided
};

/// Sample Pearson correlation and the two-sided p-value of
/// t = r * sqrt((n - 2) / (1 - r^2)) under Student's t with n - 2 degrees of
/// freedom. Needs at least 3 pairs and non-zero variance in both coordinates
/// (DomainError otherwise).
PearsonResult pearson(std::span<const std::pair<double, double>> pairs);

}  // namespace relik
