#include "sqmag/levmar.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sqmag/error.hpp"

namespace sqmag {

namespace {

bool try_eval(const ResidualFn& fn, const Eigen::VectorXd& x, Eigen::VectorXd& r) {
  try {
    fn(x, r);
  } catch (const Error&) {
    return false;
  }
  return r.allFinite();
}

}  // namespace

Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, double rel_step, int* evaluations) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac(r0.size(), n);
  Eigen::VectorXd xp = x, rp(r0.size()), rm(r0.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = rel_step * std::max(std::abs(x(j)), 1.0);
    const bool up_ok = x(j) + h <= upper(j);
    const bool down_ok = x(j) - h >= lower(j);
    xp = x;
    if (up_ok && down_ok) {
      xp(j) = x(j) + h;
      fn(xp, rp);
      xp(j) = x(j) - h;
      fn(xp, rm);
      jac.col(j) = (rp - rm) / (2.0 * h);
      if (evaluations) *evaluations += 2;
    } else if (up_ok) {
      xp(j) = x(j) + h;
      fn(xp, rp);
      jac.col(j) = (rp - r0) / h;
      if (evaluations) ++*evaluations;
    } else if (down_ok) {
      xp(j) = x(j) - h;
      fn(xp, rm);
      jac.col(j) = (r0 - rm) / h;
      if (evaluations) ++*evaluations;
    } else {
      jac.col(j).setZero();  // bounds tighter than the step: parameter is pinned
    }
  }
  return jac;
}

LmResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LmOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n)
    fail(ErrorCode::InvalidArgument, "levenberg_marquardt: bound dimensions do not match");
  x0 = x0.cwiseMax(lower).cwiseMin(upper);

  LmResult out;
  out.x = x0;
  Eigen::VectorXd r;
  fn(out.x, r);
  ++out.evaluations;
  if (!r.allFinite()) fail(ErrorCode::InvalidArgument, "levenberg_marquardt: non-finite residuals at start");
  out.cost = 0.5 * r.squaredNorm();
  double lambda = options.initial_lambda;

  Eigen::VectorXd trial_r(r.size());
  while (true) {
    if (out.cost <= options.abs_cost_tol) {
      out.converged = true;
      break;
    }
    if (out.iterations >= options.max_iterations) break;
    ++out.iterations;

    const Eigen::MatrixXd jac = numeric_jacobian(fn, out.x, r, lower, upper, options.fd_step, &out.evaluations);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::VectorXd diag = jtj.diagonal();
    const double diag_floor = 1e-12 * std::max(diag.maxCoeff(), 1e-300);
    diag = diag.cwiseMax(diag_floor);

    // coordinates sitting on a bound with the descent direction pointing
    // outward are held fixed for this iteration
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < n; ++j)
      active[j] = (out.x(j) <= lower(j) && grad(j) > 0.0) || (out.x(j) >= upper(j) && grad(j) < 0.0);

    bool accepted = false;
    bool stalled = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      Eigen::VectorXd rhs = -grad;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!active[j]) continue;
        a.row(j).setZero();
        a.col(j).setZero();
        a(j, j) = 1.0;
        rhs(j) = 0.0;
      }
      const Eigen::VectorXd step = a.ldlt().solve(rhs);
      Eigen::VectorXd trial = (out.x + step).cwiseMax(lower).cwiseMin(upper);
      const double step_norm = (trial - out.x).norm();
      if (step_norm <= options.step_tol * (out.x.norm() + options.step_tol)) {
        stalled = true;
        break;
      }
      ++out.evaluations;
      if (try_eval(fn, trial, trial_r)) {
        const double trial_cost = 0.5 * trial_r.squaredNorm();
        if (trial_cost < out.cost) {
          const double rel_change = (out.cost - trial_cost) / std::max(out.cost, 1e-300);
          out.x = trial;
          r = trial_r;
          out.cost = trial_cost;
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
          if (rel_change < options.rel_cost_tol) stalled = true;
          break;
        }
      }
      lambda *= 4.0;
      if (lambda > 1e16) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      out.converged = true;
      break;
    }
  }
  out.residuals = r;
  out.jacobian = numeric_jacobian(fn, out.x, r, lower, upper, options.fd_step, &out.evaluations);
  return out;
}

}  // namespace sqmag
