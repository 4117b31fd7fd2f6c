#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Dense>

namespace rkhawkes {

/// Returns f(x) and writes grad f(x) into the second argument.
using ValueAndGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct OptimOptions {
  std::size_t max_iters = 500;
  double grad_tol = 1e-6;   ///< on the infinity norm of the projected gradient
  double f_tol = 1e-10;     ///< relative decrease between accepted iterates
  std::size_t history = 10; ///< quasi-Newton memory
  /// Per-parameter lower bounds; -inf (or an empty vector) means unbounded.
  Eigen::VectorXd lower_bounds;

  void validate(std::size_t n) const;
};

enum class Termination { gradient, f_tol, max_iters, line_search };
std::string to_string(Termination t);

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double projected_grad_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  Termination reason = Termination::max_iters;
  /// Objective at every accepted iterate, starting with x0.
  std::vector<double> trace;
};

/// Limited-memory BFGS with gradient projection onto lower bounds.
///
/// Variables sitting on their bound with a gradient pushing outward are held
/// fixed for the iteration; the quasi-Newton direction is computed on the
/// rest. Unconstrained steps use a Wolfe line search (Armijo + curvature);
/// steps that would cross a bound fall back to projected backtracking.
/// Throws NumericalError when an accepted iterate has a non-finite value or
/// gradient, ConfigError for invalid options or an infeasible x0.
OptimResult minimize(const ValueAndGradient& f, const Eigen::VectorXd& x0, const OptimOptions& opts);

}  // namespace rkhawkes
