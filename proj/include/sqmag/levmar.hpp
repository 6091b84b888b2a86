#pragma once

#include <Eigen/Dense>
#include <functional>

namespace sqmag {

struct LmOptions {
  int max_iterations = 500;
  double rel_cost_tol = 1e-12;
  double abs_cost_tol = 0.0;  // stop once the cost drops below this
  double step_tol = 1e-14;    // relative step size
  double fd_step = 1e-6;      // relative central-difference step
  double initial_lambda = 1e-3;
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;  // at x
  double cost = 0.0;         // 0.5 * |r|^2
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Fills r for parameters x. May throw sqmag::Error for infeasible trial
/// points; those are treated as rejected steps.
using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

/// Box-constrained Levenberg-Marquardt with Marquardt diagonal scaling and
/// central-difference Jacobians. Bounds are enforced by projection.
LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LmOptions& options = {});

/// Central-difference Jacobian, one-sided next to a bound.
Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, double rel_step, int* evaluations = nullptr);

}  // namespace sqmag
