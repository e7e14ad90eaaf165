// SPDX-License-Identifier: Apache-2.0
//
// Trajectories and the travel/smoothness objective.  A trajectory is a T x n
// matrix whose row t is the configuration at step t.
#pragma once

#include "akplan/common.hpp"

namespace akplan {

using Trajectory = Mat;  // row t = q_t

/// Sum of squared weighted forward differences plus squared weighted central
/// second differences:
///
///   sum_{t=1}^{T-1} ||W_v (q_{t+1} - q_t)||^2
///     + sum_{t=2}^{T-1} ||W_a (q_{t+1} - 2 q_t + q_{t-1})||^2
inline Scalar trajectory_objective(const Trajectory& traj, const Vec& w_v,
                                   const Vec& w_a) {
  const Eigen::Index T = traj.rows();
  require(T >= 2, ErrorKind::kDimension, "trajectory needs at least 2 steps");
  require(w_v.size() == traj.cols() && w_a.size() == traj.cols(),
          ErrorKind::kDimension, "weight size mismatch");
  Scalar out = 0.0;
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    out += (w_v.array() * (traj.row(t + 1) - traj.row(t)).transpose().array())
               .matrix()
               .squaredNorm();
  }
  for (Eigen::Index t = 1; t + 1 < T; ++t) {
    const Vec acc =
        (traj.row(t + 1) - 2.0 * traj.row(t) + traj.row(t - 1)).transpose();
    out += (w_a.array() * acc.array()).matrix().squaredNorm();
  }
  return out;
}

/// Analytic gradient of trajectory_objective w.r.t. every waypoint (row t =
/// d objective / d q_t, including the first and last rows).
inline Mat trajectory_objective_gradient(const Trajectory& traj, const Vec& w_v,
                                         const Vec& w_a) {
  const Eigen::Index T = traj.rows();
  require(T >= 2, ErrorKind::kDimension, "trajectory needs at least 2 steps");
  Mat grad = Mat::Zero(T, traj.cols());
  const Vec wv2 = w_v.array().square();
  const Vec wa2 = w_a.array().square();
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    const Vec d = (traj.row(t + 1) - traj.row(t)).transpose();
    const Vec g = 2.0 * (wv2.array() * d.array()).matrix();
    grad.row(t + 1) += g.transpose();
    grad.row(t) -= g.transpose();
  }
  for (Eigen::Index t = 1; t + 1 < T; ++t) {
    const Vec a =
        (traj.row(t + 1) - 2.0 * traj.row(t) + traj.row(t - 1)).transpose();
    const Vec g = 2.0 * (wa2.array() * a.array()).matrix();
    grad.row(t + 1) += g.transpose();
    grad.row(t) -= 2.0 * g.transpose();
    grad.row(t - 1) += g.transpose();
  }
  return grad;
}

}  // namespace akplan
