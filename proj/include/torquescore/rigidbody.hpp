#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <vector>

#include "torquescore/errors.hpp"
#include "torquescore/model.hpp"

namespace torquescore {

/// Per-frame state s = (q, qdot, qddot), each of length N.
/// q = [root translation (3), Euler angles (3J)]; joint 0's angles are the
/// root orientation.
struct GeneralizedState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::VectorXd qddot;
};

using TorqueVector = Eigen::VectorXd;
using MassMatrix = Eigen::MatrixXd;

inline constexpr double kEulerSingularTol = 1e-10;

namespace detail {

inline Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

inline Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

inline Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return m;
}

}  // namespace detail

/// Intrinsic X-Y-Z Euler rotation: R = Rx(a) * Ry(b) * Rz(c).
inline Eigen::Matrix3d euler_rotation(const Eigen::Vector3d& abc) {
  return detail::rot_x(abc.x()) * detail::rot_y(abc.y()) * detail::rot_z(abc.z());
}

/// Euler-rate map E such that the relative angular velocity of the joint,
/// expressed in the parent frame, is omega = E(theta) * theta_dot.
/// Columns are the instantaneous world directions of the three Euler axes:
/// [ex | Rx*ey | Rx*Ry*ez].
inline Eigen::Matrix3d euler_rate_map(const Eigen::Vector3d& abc) {
  const Eigen::Matrix3d rx = detail::rot_x(abc.x());
  const Eigen::Matrix3d rxy = rx * detail::rot_y(abc.y());
  Eigen::Matrix3d e;
  e.col(0) = Eigen::Vector3d::UnitX();
  e.col(1) = rx.col(1);
  e.col(2) = rxy.col(2);
  return e;
}

/// Time derivative of euler_rate_map along (theta, theta_dot).
inline Eigen::Matrix3d euler_rate_map_dot(const Eigen::Vector3d& abc,
                                          const Eigen::Vector3d& abc_dot) {
  const Eigen::Matrix3d rx = detail::rot_x(abc.x());
  const Eigen::Matrix3d ry = detail::rot_y(abc.y());
  const Eigen::Matrix3d sx = detail::skew(Eigen::Vector3d::UnitX());
  const Eigen::Matrix3d sy = detail::skew(Eigen::Vector3d::UnitY());
  Eigen::Matrix3d de = Eigen::Matrix3d::Zero();
  // d/dt [Rx ey] = a_dot [ex]x Rx ey
  de.col(1) = abc_dot.x() * (sx * rx.col(1));
  // d/dt [Rx Ry ez] = a_dot [ex]x Rx Ry ez + b_dot Rx [ey]x Ry ez
  de.col(2) = abc_dot.x() * (sx * (rx * ry).col(2)) +
              abc_dot.y() * (rx * sy * ry.col(2));
  return de;
}

/// Smallest singular value of the Euler-rate map; det(E) = cos(b), so the
/// map degenerates as the middle angle approaches +-pi/2.
inline double euler_map_min_singular(const Eigen::Vector3d& abc) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(euler_rate_map(abc));
  return svd.singularValues().minCoeff();
}

inline void check_euler_regular(const Eigen::Vector3d& abc, int joint) {
  // Cheap guard: only pay for the exact singular value near the lock.
  if (std::abs(std::cos(abc.y())) < 1e-6 &&
      euler_map_min_singular(abc) < kEulerSingularTol)
    throw SingularEulerMap("gimbal lock at joint " + std::to_string(joint));
}

struct ForwardKinematics {
  std::vector<Eigen::Vector3d> positions;   // joint origins, world frame
  std::vector<Eigen::Matrix3d> rotations;   // joint frames, world frame

  Eigen::VectorXd flat_positions() const {
    Eigen::VectorXd r(3 * positions.size());
    for (size_t i = 0; i < positions.size(); ++i)
      r.segment<3>(3 * i) = positions[i];
    return r;
  }
};

inline void check_dim(const KinematicModel& model, const Eigen::VectorXd& v,
                      const char* what) {
  if (v.size() != model.dof())
    throw DimensionMismatch(std::string(what) + ": expected length " +
                            std::to_string(model.dof()) + ", got " +
                            std::to_string(v.size()));
}

/// Global joint positions r in R^{3J} and orientations from configuration q.
inline ForwardKinematics forward_kinematics(const KinematicModel& model,
                                            const Eigen::VectorXd& q) {
  check_dim(model, q, "forward_kinematics q");
  const int nj = model.joint_count();
  ForwardKinematics fk;
  fk.positions.resize(nj);
  fk.rotations.resize(nj);
  for (int j = 0; j < nj; ++j) {
    const JointSpec& spec = model.joints[j];
    const Eigen::Vector3d angles = q.segment<3>(3 + 3 * j);
    const Eigen::Matrix3d rel = euler_rotation(angles);
    if (spec.parent == kRootParent) {
      fk.positions[j] = q.head<3>() + spec.offset;
      fk.rotations[j] = rel;
    } else {
      fk.positions[j] =
          fk.positions[spec.parent] + fk.rotations[spec.parent] * spec.offset;
      fk.rotations[j] = fk.rotations[spec.parent] * rel;
    }
  }
  return fk;
}

/// Recursive Newton-Euler inverse dynamics in Euler-rate coordinates:
/// tau = M(q) qddot + h(q, qdot) - f_ext.
///
/// Euler-angle rates are mapped to angular velocities via the rate map and
/// its derivative on the way out; joint moments come back through the
/// transpose of the same map, so tau is power-conjugate to qdot.
inline TorqueVector inverse_dynamics(const KinematicModel& model,
                                     const GeneralizedState& s,
                                     const Eigen::VectorXd& f_ext) {
  check_dim(model, s.q, "inverse_dynamics q");
  check_dim(model, s.qdot, "inverse_dynamics qdot");
  check_dim(model, s.qddot, "inverse_dynamics qddot");
  if (f_ext.size() != 0) check_dim(model, f_ext, "inverse_dynamics f_ext");

  const int nj = model.joint_count();
  std::vector<Eigen::Matrix3d> rot(nj);      // world rotation of joint frame
  std::vector<Eigen::Vector3d> pos(nj);      // world joint origin
  std::vector<Eigen::Vector3d> omega(nj);    // world angular velocity
  std::vector<Eigen::Vector3d> alpha(nj);    // world angular acceleration
  std::vector<Eigen::Vector3d> acc(nj);      // world linear accel of origin
  std::vector<Eigen::Matrix3d> axes(nj);     // world Euler-rate map R_p * E

  // Outward pass. Gravity enters as a fictitious base acceleration.
  for (int j = 0; j < nj; ++j) {
    const JointSpec& spec = model.joints[j];
    const Eigen::Vector3d th = s.q.segment<3>(3 + 3 * j);
    const Eigen::Vector3d thd = s.qdot.segment<3>(3 + 3 * j);
    const Eigen::Vector3d thdd = s.qddot.segment<3>(3 + 3 * j);
    check_euler_regular(th, j);
    const Eigen::Matrix3d e = euler_rate_map(th);
    const Eigen::Matrix3d edot = euler_rate_map_dot(th, thd);
    const Eigen::Matrix3d rel = euler_rotation(th);
    const Eigen::Vector3d w_rel = e * thd;            // parent frame
    const Eigen::Vector3d wd_rel = e * thdd + edot * thd;

    if (spec.parent == kRootParent) {
      rot[j] = rel;
      // Only relative positions enter the moment arms; dropping the root
      // translation here makes torques exactly invariant to it.
      pos[j] = spec.offset;
      omega[j] = w_rel;
      alpha[j] = wd_rel;
      acc[j] = s.qddot.head<3>() - model.gravity;
      axes[j] = e;
    } else {
      const int p = spec.parent;
      const Eigen::Vector3d arm = rot[p] * spec.offset;
      rot[j] = rot[p] * rel;
      pos[j] = pos[p] + arm;
      omega[j] = omega[p] + rot[p] * w_rel;
      alpha[j] = alpha[p] + rot[p] * wd_rel + omega[p].cross(rot[p] * w_rel);
      acc[j] = acc[p] + alpha[p].cross(arm) + omega[p].cross(omega[p].cross(arm));
      axes[j] = rot[p] * e;
    }
  }

  // Inward pass: accumulate forces and moments about joint origins.
  std::vector<Eigen::Vector3d> force(nj, Eigen::Vector3d::Zero());
  std::vector<Eigen::Vector3d> moment(nj, Eigen::Vector3d::Zero());
  for (int j = nj - 1; j >= 0; --j) {
    const JointSpec& spec = model.joints[j];
    const Eigen::Vector3d c = rot[j] * spec.com;
    const Eigen::Vector3d a_com =
        acc[j] + alpha[j].cross(c) + omega[j].cross(omega[j].cross(c));
    const Eigen::Matrix3d inertia_w = rot[j] * spec.inertia * rot[j].transpose();
    const Eigen::Vector3d f = spec.mass * a_com;
    const Eigen::Vector3d n =
        inertia_w * alpha[j] + omega[j].cross(inertia_w * omega[j]);
    force[j] += f;
    moment[j] += n + c.cross(f);
    if (spec.parent != kRootParent) {
      const int p = spec.parent;
      force[p] += force[j];
      moment[p] += moment[j] + (pos[j] - pos[p]).cross(force[j]);
    }
  }

  TorqueVector tau = Eigen::VectorXd::Zero(model.dof());
  tau.head<3>() = force[0];
  for (int j = 0; j < nj; ++j)
    tau.segment<3>(3 + 3 * j) = axes[j].transpose() * moment[j];
  if (f_ext.size() != 0) tau -= f_ext;
  return tau;
}

inline TorqueVector inverse_dynamics(const KinematicModel& model,
                                     const GeneralizedState& s) {
  return inverse_dynamics(model, s, Eigen::VectorXd());
}

/// h(q, qdot): gravity + Coriolis + centrifugal generalized forces.
inline Eigen::VectorXd bias_term(const KinematicModel& model,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& qdot) {
  GeneralizedState s{q, qdot, Eigen::VectorXd::Zero(q.size())};
  return inverse_dynamics(model, s);
}

/// Generalized inertia via column-wise inverse dynamics:
/// M(:,k) = ID(q, 0, e_k) - ID(q, 0, 0).
inline MassMatrix mass_matrix(const KinematicModel& model,
                              const Eigen::VectorXd& q) {
  check_dim(model, q, "mass_matrix q");
  const int n = model.dof();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd h = bias_term(model, q, zero);
  MassMatrix m(n, n);
  GeneralizedState s{q, zero, zero};
  for (int k = 0; k < n; ++k) {
    s.qddot = Eigen::VectorXd::Unit(n, k);
    m.col(k) = inverse_dynamics(model, s) - h;
  }
  return m;
}

}  // namespace torquescore
