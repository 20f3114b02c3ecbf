#pragma once

// Modified (Craig) Denavit-Hartenberg kinematics and the virtual-joint
// parametrization of a skin unit's mounting pose.
//
//   T(row, q) = RotX(alpha) * TransX(a) * RotZ(theta_offset + q) * TransZ(d)

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <utility>
#include <vector>

namespace skincal {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wrap an angle into (-pi, pi].
double normalize_angle(double angle);

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  Vec3 operator*(const Vec3& point) const { return rotation * point + translation; }

  RigidTransform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -rt * translation};
  }

  /// Orthonormality and unit determinant, elementwise within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

struct DhRow {
  double d = 0.0;
  double theta_offset = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  std::pair<double, double> joint_limits{-3.141592653589793, 3.141592653589793};
  double velocity_limit = 2.0;

  /// Copy with angles wrapped into (-pi, pi]. Throws on non-finite values
  /// or inverted limits.
  DhRow normalized() const;
};

struct KinematicChain {
  RigidTransform base_frame;
  std::vector<DhRow> rows;

  std::size_t size() const { return rows.size(); }
  /// Throws InvalidArgument unless the chain has at least two joints.
  void validate() const;
};

/// Six mounting parameters of skin unit k relative to its host joint n:
/// a fixed virtual joint (d_v, theta_v, 0, 0) followed by the unit's own
/// DH tuple (d_su, theta_su, a_su, alpha_su).
struct SuParams {
  double d_v = 0.0;
  double theta_v = 0.0;
  double d_su = 0.0;
  double theta_su = 0.0;
  double a_su = 0.0;
  double alpha_su = 0.0;
  std::size_t host_joint = 1;  // one-based

  SuParams normalized() const;
};

struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::VectorXd qddot;

  static JointState at_rest(const Eigen::VectorXd& q) {
    return {q, Eigen::VectorXd::Zero(q.size()), Eigen::VectorXd::Zero(q.size())};
  }
};

RigidTransform rot_x(double angle);
RigidTransform rot_z(double angle);
RigidTransform trans_x(double dist);
RigidTransform trans_z(double dist);

RigidTransform dh_transform(const DhRow& row, double q);

/// Base-frame transforms of every joint frame, ᵇT_1 .. ᵇT_N. The chain's
/// base_frame is not applied (see `world_transform`).
std::vector<RigidTransform> chain_fk(const KinematicChain& chain, const Eigen::VectorXd& q);

/// Same as chain_fk without the joint-limit check. Used where a
/// configuration is only a reference for rigid-body comparisons.
std::vector<RigidTransform> chain_fk_unchecked(const KinematicChain& chain,
                                               const Eigen::VectorXd& q);

/// Throws LimitViolation carrying the offending one-based joint index.
void check_limits(const KinematicChain& chain, const Eigen::VectorXd& q);

/// ⁿT_k from the six mounting parameters.
RigidTransform su_transform(const SuParams& phi);

/// ʷT_k = base_frame · ᵇT_n · ⁿT_k.
RigidTransform su_world_pose(const KinematicChain& chain, const SuParams& phi,
                             const Eigen::VectorXd& q);

/// Zero configuration clamped into the joint limits.
Eigen::VectorXd reference_configuration(const KinematicChain& chain);

/// Representative 7-DoF all-revolute arm used by the CLI and the tests.
KinematicChain example_7dof_chain();

}  // namespace skincal
