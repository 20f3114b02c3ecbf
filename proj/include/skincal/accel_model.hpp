#pragma once

// Accelerometer reading of a skin unit: rotated gravity plus the centripetal
// and tangential accelerations induced by one rotating joint.

#include "skincal/kinematics.hpp"

#include <cstddef>
#include <functional>

namespace skincal {

enum class FrameTag { kBase, kJoint, kSkinUnit };

/// A 3-vector tagged with the frame it is expressed in. `index` is the
/// joint or skin-unit number for the non-base tags.
struct AccelVector {
  Vec3 a = Vec3::Zero();
  FrameTag frame = FrameTag::kBase;
  std::size_t index = 0;

  /// Throws InvalidArgument unless the tag matches.
  const Vec3& expect(FrameTag tag, std::size_t idx = 0) const;
};

inline constexpr double kStandardGravity = 9.81;

/// Gravity reaction in the base frame. A resting upright accelerometer
/// reads +g on its z axis.
struct GravityModel {
  Vec3 g_base{0.0, 0.0, kStandardGravity};
};

/// How the tangential term of a predicted reading is obtained.
enum class TangentialMethod {
  kAnalytic,  ///< qddot * z x r
  kNumeric,   ///< projected central second difference of r(t)
};

inline constexpr double kDefaultDifferenceStep = 0.001;

/// ω × (ω × r) with ω = (0, 0, qdot), in the joint frame.
Vec3 centripetal_accel(double qdot, const Vec3& r);

/// (0, 0, qddot) × r, in the joint frame.
Vec3 tangential_accel(double qddot, const Vec3& r);

/// Raw central second difference (r(h) + r(-h) - 2 r(0)) / h².
Vec3 second_difference(const std::function<Vec3(double)>& r_traj, double h);

/// Tangential acceleration from a sampled position trajectory: the central
/// second difference projected onto e_tan = normalize(axis × r(0)). The
/// radial (centripetal) part of the difference is dropped. Returns zero when
/// r(0) is parallel to the axis. Throws InvalidArgument unless h > 0.
Vec3 tangential_accel_numeric(const std::function<Vec3(double)>& r_traj,
                              double h = kDefaultDifferenceStep,
                              const Vec3& axis = Vec3::UnitZ());

/// Motion state of the single excited joint at the evaluated instant.
struct ExcitedJointMotion {
  double qdot = 0.0;
  double qddot = 0.0;
};

/// Reading in the SU frame given the SU's orientation in the base frame,
/// its pose relative to the excited joint frame, and the joint's motion.
Vec3 reading_from_geometry(const Mat3& base_R_su, const RigidTransform& joint_T_su,
                           const ExcitedJointMotion& motion, const GravityModel& gravity,
                           TangentialMethod method = TangentialMethod::kAnalytic,
                           double h = kDefaultDifferenceStep);

/// Predicted accelerometer reading of the SU described by `phi`, with
/// `excited_joint` (one-based) moving with state.qdot / state.qddot and all
/// other joints at rest. Throws InvalidArgument if the excited joint is
/// distal to the host joint.
Vec3 total_accel(const KinematicChain& chain, const SuParams& phi, const JointState& state,
                 std::size_t excited_joint, const GravityModel& gravity = {},
                 TangentialMethod method = TangentialMethod::kAnalytic);

/// Gravity-only reading at rest.
Vec3 static_accel(const KinematicChain& chain, const SuParams& phi, const Eigen::VectorXd& q,
                  const GravityModel& gravity = {});

}  // namespace skincal
