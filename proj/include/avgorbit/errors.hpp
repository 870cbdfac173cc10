#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace avgorbit {

enum class ErrorKind {
  invalid_argument,
  divergence,
  stiffness,
  degenerate_map,
  nonconvergence,
  singular_jacobian,
  domain,
  unsupported,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Non-finite state during integration; `last_time` is the last time with a
/// finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(double last_time, const std::string& what)
      : Error(ErrorKind::divergence, what), last_time_(last_time) {}

  double last_time() const { return last_time_; }

 private:
  double last_time_;
};

/// Iterative solver gave up. Carries the best iterate seen.
class NonconvergenceError : public Error {
 public:
  NonconvergenceError(double best_residual, Eigen::VectorXd best_iterate,
                      const std::string& what)
      : Error(ErrorKind::nonconvergence, what),
        best_residual_(best_residual),
        best_iterate_(std::move(best_iterate)) {}

  double best_residual() const { return best_residual_; }
  const Eigen::VectorXd& best_iterate() const { return best_iterate_; }

 private:
  double best_residual_;
  Eigen::VectorXd best_iterate_;
};

}  // namespace avgorbit
