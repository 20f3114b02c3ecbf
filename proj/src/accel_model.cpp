#include "skincal/accel_model.hpp"

#include "skincal/errors.hpp"

#include <cmath>
#include <string>

namespace skincal {

const Vec3& AccelVector::expect(FrameTag tag, std::size_t idx) const {
  if (frame != tag || (tag != FrameTag::kBase && index != idx))
    throw InvalidArgument("acceleration expressed in an unexpected frame");
  return a;
}

Vec3 centripetal_accel(double qdot, const Vec3& r) {
  const Vec3 omega(0.0, 0.0, qdot);
  return omega.cross(omega.cross(r));
}

Vec3 tangential_accel(double qddot, const Vec3& r) {
  return Vec3(0.0, 0.0, qddot).cross(r);
}

Vec3 second_difference(const std::function<Vec3(double)>& r_traj, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("difference step must be positive");
  return (r_traj(h) + r_traj(-h) - 2.0 * r_traj(0.0)) / (h * h);
}

Vec3 tangential_accel_numeric(const std::function<Vec3(double)>& r_traj, double h,
                              const Vec3& axis) {
  const Vec3 raw = second_difference(r_traj, h);
  const Vec3 tangent = axis.cross(r_traj(0.0));
  const double norm = tangent.norm();
  if (norm <= 1e-12 * (1.0 + r_traj(0.0).norm())) return Vec3::Zero();
  const Vec3 e_tan = tangent / norm;
  return e_tan * e_tan.dot(raw);
}

Vec3 reading_from_geometry(const Mat3& base_R_su, const RigidTransform& joint_T_su,
                           const ExcitedJointMotion& motion, const GravityModel& gravity,
                           TangentialMethod method, double h) {
  const Vec3& r = joint_T_su.translation;
  Vec3 motion_accel = centripetal_accel(motion.qdot, r);
  if (method == TangentialMethod::kAnalytic) {
    motion_accel += tangential_accel(motion.qddot, r);
  } else {
    // Position of the unit in the joint frame frozen at t = 0 while the joint
    // follows q(t) = qdot t + qddot t² / 2.
    auto r_traj = [&](double t) -> Vec3 {
      const double dq = motion.qdot * t + 0.5 * motion.qddot * t * t;
      return Eigen::AngleAxisd(dq, Vec3::UnitZ()) * r;
    };
    motion_accel += tangential_accel_numeric(r_traj, h);
  }
  return base_R_su.transpose() * gravity.g_base + joint_T_su.rotation.transpose() * motion_accel;
}

Vec3 total_accel(const KinematicChain& chain, const SuParams& phi, const JointState& state,
                 std::size_t excited_joint, const GravityModel& gravity,
                 TangentialMethod method) {
  const std::size_t n = phi.host_joint;
  if (n < 1 || n > chain.size()) throw InvalidArgument("host joint outside chain");
  if (excited_joint < 1 || excited_joint > n)
    throw InvalidArgument("excited joint " + std::to_string(excited_joint) +
                          " does not move a unit hosted on joint " + std::to_string(n));
  const auto size = static_cast<Eigen::Index>(chain.size());
  if (state.qdot.size() != size || state.qddot.size() != size)
    throw InvalidArgument("joint state size does not match chain");

  const auto frames = chain_fk(chain, state.q);
  const RigidTransform base_T_su = frames[n - 1] * su_transform(phi);
  const RigidTransform joint_T_su = frames[excited_joint - 1].inverse() * base_T_su;
  const auto d = static_cast<Eigen::Index>(excited_joint - 1);
  const ExcitedJointMotion motion{state.qdot[d], state.qddot[d]};
  if (!std::isfinite(motion.qdot) || !std::isfinite(motion.qddot))
    throw InvalidArgument("non-finite joint motion");
  return reading_from_geometry(base_T_su.rotation, joint_T_su, motion, gravity, method);
}

Vec3 static_accel(const KinematicChain& chain, const SuParams& phi, const Eigen::VectorXd& q,
                  const GravityModel& gravity) {
  return total_accel(chain, phi, JointState::at_rest(q), phi.host_joint, gravity);
}

}  // namespace skincal
