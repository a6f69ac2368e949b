#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "torquescore/errors.hpp"
#include "torquescore/motion.hpp"
#include "torquescore/parallel.hpp"
#include "torquescore/rigidbody.hpp"

namespace torquescore {

/// Finite-difference step sizes and floors for the torque-sensitivity
/// Jacobian. Velocity and acceleration steps are scaled by fps powers so a
/// perturbation in each block represents a comparable pose displacement
/// over one frame.
struct PerturbationConfig {
  double eps_q = 1e-4;       // rad / m
  double eps_qdot = 3e-3;    // 1e-4 * fps at 30 fps
  double eps_qddot = 9e-2;   // 1e-4 * fps^2 at 30 fps
  double norm_smoothing = 1e-8;   // delta in the smoothed joint-torque norm
  double singular_floor = 1e-12;  // relative floor for log-singular values
  bool theta_only = false;   // restrict perturbations to the Euler-angle block

  static PerturbationConfig for_fps(double fps, double eps = 1e-4) {
    PerturbationConfig cfg;
    cfg.eps_q = eps;
    cfg.eps_qdot = eps * fps;
    cfg.eps_qddot = eps * fps * fps;
    return cfg;
  }

  void validate() const {
    if (eps_q <= 0 || eps_qdot <= 0 || eps_qddot <= 0 || norm_smoothing <= 0 ||
        singular_floor <= 0)
      throw ValidationError("perturbation config entries must be > 0");
  }
};

/// Torque-sensitivity Jacobian of one frame: J rows (reduced joint torques)
/// by D = 3N columns (q block, qdot block, qddot block).
struct FrameJacobian {
  Eigen::MatrixXd matrix;
  int frame_index = 0;
  bool degenerate = false;   // gimbal-lock frame; matrix is all zeros
};

/// Per-frame Jacobians flattened into rows: t x (J*D), row-major over (j, k).
struct StackedJacobian {
  Eigen::MatrixXd matrix;
  std::vector<bool> degenerate;   // one flag per frame

  int frame_count() const { return static_cast<int>(matrix.rows()); }
  double degenerate_fraction() const {
    if (degenerate.empty()) return 0.0;
    int n = 0;
    for (bool d : degenerate) n += d ? 1 : 0;
    return static_cast<double>(n) / degenerate.size();
  }
};

/// Reduce an N-dim torque vector to one magnitude per joint:
/// entry j = sqrt(|tau_j|^2 + delta^2) - delta over joint j's three
/// Euler-rate components. Root translational residuals are excluded; they
/// are not actuator torques.
inline Eigen::VectorXd joint_torque_reduction(const TorqueVector& tau,
                                              const KinematicModel& model,
                                              double delta = 1e-8) {
  check_dim(model, tau, "joint_torque_reduction tau");
  const int nj = model.joint_count();
  Eigen::VectorXd out(nj);
  for (int j = 0; j < nj; ++j) {
    const double sq = tau.segment<3>(3 + 3 * j).squaredNorm();
    out[j] = std::sqrt(sq + delta * delta) - delta;
  }
  return out;
}

namespace detail {

inline Eigen::VectorXd reduced_torque_at(const KinematicModel& model,
                                         GeneralizedState s, int dim,
                                         double step, double delta) {
  const int n = model.dof();
  if (dim < n)
    s.q[dim] += step;
  else if (dim < 2 * n)
    s.qdot[dim - n] += step;
  else
    s.qddot[dim - 2 * n] += step;
  return joint_torque_reduction(inverse_dynamics(model, s), model, delta);
}

}  // namespace detail

/// Central-difference Jacobian of the reduced torque map at one state.
/// Gimbal-lock frames come back zeroed with the degenerate flag set instead
/// of aborting a batch.
inline FrameJacobian frame_jacobian(const KinematicModel& model,
                                    const GeneralizedState& s,
                                    const PerturbationConfig& cfg,
                                    int frame_index = 0) {
  cfg.validate();
  const int n = model.dof();
  const int d = 3 * n;
  FrameJacobian fj;
  fj.frame_index = frame_index;
  fj.matrix = Eigen::MatrixXd::Zero(model.joint_count(), d);
  try {
    for (int k = 0; k < d; ++k) {
      const int block = k / n;
      if (cfg.theta_only && block == 0 && k % n < 3) continue;
      if (cfg.theta_only && block != 0) continue;
      const double eps = block == 0   ? cfg.eps_q
                         : block == 1 ? cfg.eps_qdot
                                      : cfg.eps_qddot;
      const Eigen::VectorXd plus =
          detail::reduced_torque_at(model, s, k, eps, cfg.norm_smoothing);
      const Eigen::VectorXd minus =
          detail::reduced_torque_at(model, s, k, -eps, cfg.norm_smoothing);
      fj.matrix.col(k) = (plus - minus) / (2.0 * eps);
    }
  } catch (const SingularEulerMap&) {
    fj.matrix.setZero();
    fj.degenerate = true;
  }
  return fj;
}

/// Pre-reduction hook: raw dtau/dstate (N x 3N) at one state, used by the
/// consistency checks against mass_matrix and the chain rule.
inline Eigen::MatrixXd frame_jacobian_raw(const KinematicModel& model,
                                          const GeneralizedState& s,
                                          const PerturbationConfig& cfg) {
  cfg.validate();
  const int n = model.dof();
  Eigen::MatrixXd out(n, 3 * n);
  for (int k = 0; k < 3 * n; ++k) {
    const int block = k / n;
    const double eps = block == 0   ? cfg.eps_q
                       : block == 1 ? cfg.eps_qdot
                                    : cfg.eps_qddot;
    GeneralizedState sp = s, sm = s;
    Eigen::VectorXd& vp = block == 0 ? sp.q : block == 1 ? sp.qdot : sp.qddot;
    Eigen::VectorXd& vm = block == 0 ? sm.q : block == 1 ? sm.qdot : sm.qddot;
    vp[k % n] += eps;
    vm[k % n] -= eps;
    out.col(k) =
        (inverse_dynamics(model, sp) - inverse_dynamics(model, sm)) /
        (2.0 * eps);
  }
  return out;
}

/// One FrameJacobian per clip frame, flattened into the rows of the stack.
/// Frames are independent, so the map is parallel; assembly is ordered.
inline StackedJacobian sequence_jacobians(const KinematicModel& model,
                                          const Clip& clip,
                                          const PerturbationConfig& cfg,
                                          int num_threads = 1) {
  const MotionSequence& m = clip.motion;
  if (!m.has_derivatives())
    throw TooShort("clip has no derivative tracks; run estimate_derivatives");
  const int t = m.frame_count();
  const int nj = model.joint_count();
  const int d = 3 * model.dof();
  StackedJacobian stack;
  stack.matrix.resize(t, nj * d);
  stack.degenerate.assign(t, false);
  std::vector<FrameJacobian> rows(t);
  parallel_for(t, num_threads, [&](int i) {
    GeneralizedState s{m.frames[i], m.qdot[i], m.qddot[i]};
    rows[i] = frame_jacobian(model, s, cfg, i);
  });
  for (int i = 0; i < t; ++i) {
    stack.degenerate[i] = rows[i].degenerate;
    // row-major over (joint, direction)
    for (int j = 0; j < nj; ++j)
      stack.matrix.block(i, j * d, 1, d) = rows[i].matrix.row(j);
  }
  return stack;
}

/// Unflatten the stack back into per-frame Jacobians (J x D each).
inline std::vector<FrameJacobian> unstack(const StackedJacobian& stack,
                                          int joints) {
  const int t = stack.frame_count();
  const int d = static_cast<int>(stack.matrix.cols()) / joints;
  std::vector<FrameJacobian> frames(t);
  for (int i = 0; i < t; ++i) {
    frames[i].frame_index = i;
    frames[i].degenerate = stack.degenerate.empty() ? false : stack.degenerate[i];
    frames[i].matrix.resize(joints, d);
    for (int j = 0; j < joints; ++j)
      frames[i].matrix.row(j) = stack.matrix.block(i, j * d, 1, d);
  }
  return frames;
}

}  // namespace torquescore
