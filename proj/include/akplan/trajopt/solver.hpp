// SPDX-License-Identifier: Apache-2.0
//
// A-Space trajectory optimizer.
//
// The constrained problem is solved as a sequence of nonlinear least-squares
// problems: every constraint family enters as a residual block scaled by the
// square root of a penalty weight mu, and mu grows geometrically until all
// families are satisfied (quadratic exterior penalty).  Each fixed-mu problem
// is minimized with Levenberg-Marquardt on the stacked residual vector.
// Gradients are analytic for the objective, chain, goal, and limit blocks;
// collision blocks use central finite differences of the per-step penetration
// sums.  The first waypoint is pinned to the start configuration.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "akplan/trajopt/check.hpp"
#include "akplan/trajopt/initialize.hpp"
#include "akplan/trajopt/problem.hpp"
#include "akplan/trajopt/trajectory.hpp"

namespace akplan {

enum class SolveStatus { kConverged, kInfeasible, kBudgetExceeded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kBudgetExceeded:
      return "budget-exceeded";
  }
  return "budget-exceeded";
}

struct SolveReport {
  SolveStatus status{SolveStatus::kBudgetExceeded};
  Trajectory trajectory;
  Scalar objective{0.0};
  /// Worst excess per constraint family at the final trajectory (solver-side
  /// evaluation; <= 0 means satisfied).
  std::map<std::string, Scalar> violation;
  int outer_iterations{0};
  int inner_iterations{0};
  Scalar wall_time_s{0.0};
};

namespace detail {

/// Solver-side evaluation of the worst excess per family.  Definitions match
/// check_trajectory; the implementation is the solver's own.
inline std::map<std::string, Scalar> measure_violations(
    const OptProblem& problem, const Trajectory& traj) {
  const TrajoptParams& prm = problem.params;
  const Akr& akr = problem.akr;
  const Eigen::Index T = traj.rows();
  const Vec& lo = akr.lower_limits();
  const Vec& hi = akr.upper_limits();

  std::map<std::string, Scalar> v;
  v[family::kGoal] =
      goal_residual(akr, problem.goal, traj.row(T - 1).transpose())
          .squaredNorm() -
      prm.xi_goal;
  Scalar chain = -prm.xi_chain, limits = -1.0, vel = -1.0, acc = -1.0;
  Scalar cobs = -prm.xi_dist, cself = -prm.xi_dist;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec q = traj.row(t).transpose();
    chain = std::max(chain, akr.chain_residual(q).norm() - prm.xi_chain);
    limits = std::max({limits, (q - hi).maxCoeff(), (lo - q).maxCoeff()});
    if (t + 1 < T) {
      vel = std::max(vel, (traj.row(t + 1) - traj.row(t))
                                  .cwiseAbs()
                                  .maxCoeff() -
                              prm.dq_max);
    }
    if (t >= 1 && t + 1 < T) {
      acc = std::max(acc, (traj.row(t + 1) - 2.0 * traj.row(t) +
                           traj.row(t - 1))
                                  .cwiseAbs()
                                  .maxCoeff() -
                              prm.ddq_max);
    }
    const auto [so, ss] =
        collision_sums(akr, problem.obstacles, q, prm.dist_safe);
    cobs = std::max(cobs, so - prm.xi_dist);
    cself = std::max(cself, ss - prm.xi_dist);
  }
  v[family::kChain] = chain;
  v[family::kLimits] = limits;
  v[family::kVelocity] = vel;
  v[family::kAcceleration] = acc;
  v[family::kCollisionObstacle] = cobs;
  v[family::kCollisionSelf] = cself;
  return v;
}

inline Scalar worst_violation(const std::map<std::string, Scalar>& v) {
  Scalar worst = 0.0;
  for (const auto& [name, x] : v) worst = std::max(worst, x);
  return worst;
}

/// Residual/Jacobian assembly for one penalty weight.
class PenaltyLeastSquares {
 public:
  PenaltyLeastSquares(const OptProblem& problem, Scalar mu)
      : p_(problem),
        n_(problem.dofs()),
        T_(problem.params.waypoints),
        chain_dim_(problem.akr.chain_dim()),
        smu_(std::sqrt(mu)) {
    rows_velocity_ = 0;
    rows_accel_ = (T_ - 1) * n_;
    rows_chain_ = rows_accel_ + (T_ - 2) * n_;
    rows_goal_ = rows_chain_ + (T_ - 1) * chain_dim_;
    rows_limits_ = rows_goal_ + 1;
    rows_vel_ineq_ = rows_limits_ + 2 * (T_ - 1) * n_;
    rows_acc_ineq_ = rows_vel_ineq_ + (T_ - 1) * n_;
    rows_collision_ = rows_acc_ineq_ + (T_ - 2) * n_;
    rows_prior_ = rows_collision_ + 2 * (T_ - 1);
    const bool prior_active = p_.params.terminal_prior.size() == n_ &&
                              p_.params.terminal_prior_weight > 0.0;
    total_rows_ = rows_prior_ + (prior_active ? n_ : 0);
  }

  [[nodiscard]] int vars() const { return (T_ - 1) * n_; }
  [[nodiscard]] int rows() const { return total_rows_; }

  /// Full trajectory from the decision vector (row 0 = pinned start).
  [[nodiscard]] Trajectory unpack(const Vec& x) const {
    Trajectory traj(T_, n_);
    traj.row(0) = p_.start.transpose();
    for (int t = 1; t < T_; ++t) {
      traj.row(t) = x.segment((t - 1) * n_, n_).transpose();
    }
    return traj;
  }

  [[nodiscard]] Vec pack(const Trajectory& traj) const {
    Vec x(vars());
    for (int t = 1; t < T_; ++t) {
      x.segment((t - 1) * n_, n_) = traj.row(t).transpose();
    }
    return x;
  }

  [[nodiscard]] Vec residuals(const Vec& x) const {
    const Trajectory traj = unpack(x);
    Vec r = Vec::Zero(total_rows_);
    const TrajoptParams& prm = p_.params;

    for (int t = 0; t + 1 < T_; ++t) {
      r.segment(rows_velocity_ + t * n_, n_) =
          prm.w_v.cwiseProduct((traj.row(t + 1) - traj.row(t)).transpose());
    }
    for (int t = 1; t + 1 < T_; ++t) {
      r.segment(rows_accel_ + (t - 1) * n_, n_) = prm.w_a.cwiseProduct(
          (traj.row(t + 1) - 2.0 * traj.row(t) + traj.row(t - 1)).transpose());
    }
    if (chain_dim_ > 0) {
      for (int t = 1; t < T_; ++t) {
        r.segment(rows_chain_ + (t - 1) * chain_dim_, chain_dim_) =
            smu_ * p_.akr.chain_residual(traj.row(t).transpose());
      }
    }
    {
      const Vec gr =
          goal_residual(p_.akr, p_.goal, traj.row(T_ - 1).transpose());
      r[rows_goal_] = smu_ * std::max(0.0, gr.squaredNorm() - prm.xi_goal);
    }
    const Vec& lo = p_.akr.lower_limits();
    const Vec& hi = p_.akr.upper_limits();
    for (int t = 1; t < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const Scalar q = traj(t, i);
        r[rows_limits_ + 2 * ((t - 1) * n_ + i)] =
            smu_ * std::max(0.0, q - hi[i]);
        r[rows_limits_ + 2 * ((t - 1) * n_ + i) + 1] =
            smu_ * std::max(0.0, lo[i] - q);
      }
    }
    for (int t = 0; t + 1 < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const Scalar d = traj(t + 1, i) - traj(t, i);
        r[rows_vel_ineq_ + t * n_ + i] =
            smu_ * std::max(0.0, std::abs(d) - prm.dq_max);
      }
    }
    for (int t = 1; t + 1 < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const Scalar a = traj(t + 1, i) - 2.0 * traj(t, i) + traj(t - 1, i);
        r[rows_acc_ineq_ + (t - 1) * n_ + i] =
            smu_ * std::max(0.0, std::abs(a) - prm.ddq_max);
      }
    }
    for (int t = 1; t < T_; ++t) {
      const auto [so, ss] = collision_sums(p_.akr, p_.obstacles,
                                           traj.row(t).transpose(),
                                           prm.dist_safe);
      r[rows_collision_ + 2 * (t - 1)] =
          smu_ * std::max(0.0, so - prm.xi_dist);
      r[rows_collision_ + 2 * (t - 1) + 1] =
          smu_ * std::max(0.0, ss - prm.xi_dist);
    }
    if (total_rows_ > rows_prior_) {
      const Scalar w = std::sqrt(prm.terminal_prior_weight);
      r.segment(rows_prior_, n_) =
          w * (traj.row(T_ - 1).transpose() - prm.terminal_prior);
    }
    return r;
  }

  [[nodiscard]] Mat jacobian(const Vec& x) const {
    const Trajectory traj = unpack(x);
    Mat J = Mat::Zero(total_rows_, vars());
    const TrajoptParams& prm = p_.params;

    const auto col0 = [&](int t) { return (t - 1) * n_; };  // t >= 1

    for (int t = 0; t + 1 < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const int row = rows_velocity_ + t * n_ + i;
        J(row, col0(t + 1) + i) = prm.w_v[i];
        if (t >= 1) J(row, col0(t) + i) = -prm.w_v[i];
      }
    }
    for (int t = 1; t + 1 < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const int row = rows_accel_ + (t - 1) * n_ + i;
        J(row, col0(t + 1) + i) = prm.w_a[i];
        J(row, col0(t) + i) = -2.0 * prm.w_a[i];
        if (t >= 2) J(row, col0(t - 1) + i) = prm.w_a[i];
      }
    }
    if (chain_dim_ > 0) {
      for (int t = 1; t < T_; ++t) {
        const Mat jc = p_.akr.chain_jacobian(traj.row(t).transpose());
        J.block(rows_chain_ + (t - 1) * chain_dim_, col0(t), chain_dim_, n_) =
            smu_ * jc;
      }
    }
    {
      const Vec qT = traj.row(T_ - 1).transpose();
      const Vec gr = goal_residual(p_.akr, p_.goal, qT);
      if (gr.squaredNorm() - prm.xi_goal > 0.0) {
        const Mat jg = goal_jacobian(p_.akr, p_.goal, qT);
        J.block(rows_goal_, col0(T_ - 1), 1, n_) =
            smu_ * 2.0 * (gr.transpose() * jg);
      }
    }
    const Vec& lo = p_.akr.lower_limits();
    const Vec& hi = p_.akr.upper_limits();
    for (int t = 1; t < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const Scalar q = traj(t, i);
        if (q - hi[i] > 0.0) {
          J(rows_limits_ + 2 * ((t - 1) * n_ + i), col0(t) + i) = smu_;
        }
        if (lo[i] - q > 0.0) {
          J(rows_limits_ + 2 * ((t - 1) * n_ + i) + 1, col0(t) + i) = -smu_;
        }
      }
    }
    for (int t = 0; t + 1 < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const Scalar d = traj(t + 1, i) - traj(t, i);
        if (std::abs(d) - prm.dq_max > 0.0) {
          const int row = rows_vel_ineq_ + t * n_ + i;
          const Scalar s = d > 0.0 ? 1.0 : -1.0;
          J(row, col0(t + 1) + i) = smu_ * s;
          if (t >= 1) J(row, col0(t) + i) = -smu_ * s;
        }
      }
    }
    for (int t = 1; t + 1 < T_; ++t) {
      for (int i = 0; i < n_; ++i) {
        const Scalar a = traj(t + 1, i) - 2.0 * traj(t, i) + traj(t - 1, i);
        if (std::abs(a) - prm.ddq_max > 0.0) {
          const int row = rows_acc_ineq_ + (t - 1) * n_ + i;
          const Scalar s = a > 0.0 ? 1.0 : -1.0;
          J(row, col0(t + 1) + i) = smu_ * s;
          J(row, col0(t) + i) = -2.0 * smu_ * s;
          if (t >= 2) J(row, col0(t - 1) + i) = smu_ * s;
        }
      }
    }
    // Collision rows: central finite differences of the per-step sums,
    // evaluated only when the constraint is active at the current point.
    const Scalar h = 1e-5;
    for (int t = 1; t < T_; ++t) {
      Vec q = traj.row(t).transpose();
      const auto [so, ss] =
          collision_sums(p_.akr, p_.obstacles, q, prm.dist_safe);
      const bool obs_active = so - prm.xi_dist > 0.0;
      const bool self_active = ss - prm.xi_dist > 0.0;
      if (!obs_active && !self_active) continue;
      for (int i = 0; i < n_; ++i) {
        const Scalar q0 = q[i];
        q[i] = q0 + h;
        const auto [so_p, ss_p] =
            collision_sums(p_.akr, p_.obstacles, q, prm.dist_safe);
        q[i] = q0 - h;
        const auto [so_m, ss_m] =
            collision_sums(p_.akr, p_.obstacles, q, prm.dist_safe);
        q[i] = q0;
        if (obs_active) {
          J(rows_collision_ + 2 * (t - 1), col0(t) + i) =
              smu_ * (so_p - so_m) / (2.0 * h);
        }
        if (self_active) {
          J(rows_collision_ + 2 * (t - 1) + 1, col0(t) + i) =
              smu_ * (ss_p - ss_m) / (2.0 * h);
        }
      }
    }
    if (total_rows_ > rows_prior_) {
      const Scalar w = std::sqrt(prm.terminal_prior_weight);
      for (int i = 0; i < n_; ++i) {
        J(rows_prior_ + i, col0(T_ - 1) + i) = w;
      }
    }
    return J;
  }

 private:
  const OptProblem& p_;
  int n_;
  int T_;
  int chain_dim_;
  Scalar smu_;
  int rows_velocity_, rows_accel_, rows_chain_, rows_goal_, rows_limits_,
      rows_vel_ineq_, rows_acc_ineq_, rows_collision_, rows_prior_;
  int total_rows_;
};

}  // namespace detail

/// Minimize the penalized least-squares problem at fixed mu.  Returns the
/// improved decision vector; adds performed iterations to *inner_iters.
inline Vec lm_minimize(const detail::PenaltyLeastSquares& pls, Vec x,
                       int max_iters, int* inner_iters) {
  Scalar lambda = 1e-4;
  Vec r = pls.residuals(x);
  Scalar cost = r.squaredNorm();
  for (int it = 0; it < max_iters; ++it) {
    ++*inner_iters;
    const Mat J = pls.jacobian(x);
    const Mat JtJ = J.transpose() * J;
    const Vec g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < 1e-12) break;

    bool stepped = false;
    for (int bump = 0; bump < 8; ++bump) {
      Mat A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal();
      A.diagonal().array() += 1e-12;
      const Vec dx = A.ldlt().solve(-g);
      const Vec x_try = x + dx;
      const Vec r_try = pls.residuals(x_try);
      const Scalar cost_try = r_try.squaredNorm();
      if (cost_try < cost) {
        const Scalar rel = (cost - cost_try) / std::max(cost, 1e-300);
        x = x_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel < 1e-10 || dx.lpNorm<Eigen::Infinity>() < 1e-11) {
          return x;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
  }
  return x;
}

inline SolveReport solve(const OptProblem& problem, const Trajectory& seed) {
  require(seed.rows() == problem.params.waypoints &&
              seed.cols() == problem.dofs(),
          ErrorKind::kDimension, "seed does not match problem dimensions");
  require((seed.row(0).transpose() - problem.start).norm() < 1e-12,
          ErrorKind::kConfig, "seed must begin at the start configuration");

  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0]() {
    return std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  SolveReport report;
  report.trajectory = seed;

  Scalar mu = 50.0;
  const Scalar mu_cap = 1e9;
  Scalar prev_worst = -1.0;
  // Feasibility slack: with the penalty weight capped, one-sided constraint
  // residuals settle where penalty pressure balances objective pressure,
  // around grad/mu_cap ~ 1e-8.  The slack must sit above that equilibrium.
  constexpr Scalar kSlack = 1e-6;

  for (int outer = 0; outer < problem.params.max_outer; ++outer) {
    report.outer_iterations = outer + 1;
    detail::PenaltyLeastSquares pls(problem, mu);
    const Vec x = lm_minimize(pls, pls.pack(report.trajectory), 15,
                              &report.inner_iterations);
    report.trajectory = pls.unpack(x);

    report.violation = detail::measure_violations(problem, report.trajectory);
    const Scalar worst = detail::worst_violation(report.violation);
    if (worst <= kSlack) {
      report.status = SolveStatus::kConverged;
      break;
    }
    if (elapsed() > problem.params.time_budget_s) {
      report.status = SolveStatus::kBudgetExceeded;
      break;
    }
    if (mu >= mu_cap && prev_worst >= 0.0 && worst > 0.99 * prev_worst) {
      report.status = SolveStatus::kInfeasible;
      break;
    }
    prev_worst = worst;
    mu = std::min(mu * 8.0, mu_cap);
    report.status = SolveStatus::kBudgetExceeded;  // until proven otherwise
  }

  report.objective = trajectory_objective(report.trajectory, problem.params.w_v,
                                          problem.params.w_a);
  report.wall_time_s = elapsed();
  return report;
}

/// Convenience entry: seed with the A* strategy, falling back to straight
/// interpolation when the grid search finds no base path.
inline SolveReport solve_with_astar_seed(const OptProblem& problem,
                                         const Vec& goal_cfg,
                                         const AstarSeedParams& seed_params = {}) {
  const auto seed = initialize_astar(problem, goal_cfg, seed_params);
  return solve(problem, seed ? *seed : initialize_interpolated(problem, goal_cfg));
}

}  // namespace akplan
