#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace avgorbit {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule with n points (n >= 1), computed by Newton iteration on the Legendre
/// recurrence. Results for repeated n are cached per thread.
const GaussRule& gauss_legendre(int n);

/// Integrates a vector-valued function over [lo, hi] with an n-point rule.
Eigen::VectorXd integrate_gauss(
    const std::function<Eigen::VectorXd(double)>& f, double lo, double hi, int n);

}  // namespace avgorbit
