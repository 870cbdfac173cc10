#include "avgorbit/quadrature.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace avgorbit {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        break;
      }
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) {
    throw std::invalid_argument("Gauss rule needs at least one node");
  }
  thread_local std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, build_rule(n)).first;
  }
  return it->second;
}

Eigen::VectorXd integrate_gauss(
    const std::function<Eigen::VectorXd(double)>& f, double lo, double hi, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  Eigen::VectorXd sum = rule.weights[0] * f(mid + half * rule.nodes[0]);
  for (int i = 1; i < n; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

}  // namespace avgorbit
