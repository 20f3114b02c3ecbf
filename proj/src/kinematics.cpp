#include "skincal/kinematics.hpp"

#include "skincal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace skincal {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string("non-finite ") + what);
}

}  // namespace

double normalize_angle(double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("non-finite angle");
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

DhRow DhRow::normalized() const {
  require_finite(d, "d");
  require_finite(a, "a");
  require_finite(velocity_limit, "velocity limit");
  if (std::isnan(joint_limits.first) || std::isnan(joint_limits.second))
    throw InvalidArgument("NaN joint limit");
  if (joint_limits.first > joint_limits.second)
    throw InvalidArgument("joint limit min exceeds max");
  DhRow out = *this;
  out.theta_offset = normalize_angle(theta_offset);
  out.alpha = normalize_angle(alpha);
  return out;
}

void KinematicChain::validate() const {
  if (rows.size() < 2) throw InvalidArgument("kinematic chain needs at least two joints");
  if (!base_frame.is_valid()) throw InvalidArgument("base frame is not a rigid transform");
}

SuParams SuParams::normalized() const {
  require_finite(d_v, "d_v");
  require_finite(d_su, "d_su");
  require_finite(a_su, "a_su");
  SuParams out = *this;
  out.theta_v = normalize_angle(theta_v);
  out.theta_su = normalize_angle(theta_su);
  out.alpha_su = normalize_angle(alpha_su);
  return out;
}

RigidTransform rot_x(double angle) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix();
  return t;
}

RigidTransform rot_z(double angle) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  return t;
}

RigidTransform trans_x(double dist) {
  RigidTransform t;
  t.translation = Vec3(dist, 0.0, 0.0);
  return t;
}

RigidTransform trans_z(double dist) {
  RigidTransform t;
  t.translation = Vec3(0.0, 0.0, dist);
  return t;
}

RigidTransform dh_transform(const DhRow& row, double q) {
  require_finite(q, "joint angle");
  require_finite(row.d, "d");
  require_finite(row.a, "a");
  require_finite(row.alpha, "alpha");
  require_finite(row.theta_offset, "theta");

  // Closed form of RotX(alpha) * TransX(a) * RotZ(theta) * TransZ(d).
  const double ct = std::cos(row.theta_offset + q);
  const double st = std::sin(row.theta_offset + q);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);

  RigidTransform t;
  t.rotation << ct, -st, 0.0,
                st * ca, ct * ca, -sa,
                st * sa, ct * sa, ca;
  t.translation << row.a, -sa * row.d, ca * row.d;
  return t;
}

void check_limits(const KinematicChain& chain, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != chain.size())
    throw InvalidArgument("configuration has " + std::to_string(q.size()) + " entries, chain has " +
                          std::to_string(chain.size()) + " joints");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto [lo, hi] = chain.rows[i].joint_limits;
    const double v = q[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(v)) throw InvalidArgument("non-finite joint angle");
    if (v < lo || v > hi) throw LimitViolation(i + 1, v, lo, hi);
  }
}

std::vector<RigidTransform> chain_fk_unchecked(const KinematicChain& chain,
                                               const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != chain.size())
    throw InvalidArgument("configuration size does not match chain");
  std::vector<RigidTransform> out;
  out.reserve(chain.size());
  RigidTransform acc;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    acc = acc * dh_transform(chain.rows[i], q[static_cast<Eigen::Index>(i)]);
    out.push_back(acc);
  }
  return out;
}

std::vector<RigidTransform> chain_fk(const KinematicChain& chain, const Eigen::VectorXd& q) {
  check_limits(chain, q);
  return chain_fk_unchecked(chain, q);
}

RigidTransform su_transform(const SuParams& phi) {
  const DhRow virtual_joint{.d = phi.d_v, .theta_offset = phi.theta_v, .a = 0.0, .alpha = 0.0};
  const DhRow unit{.d = phi.d_su, .theta_offset = phi.theta_su, .a = phi.a_su, .alpha = phi.alpha_su};
  return dh_transform(virtual_joint, 0.0) * dh_transform(unit, 0.0);
}

RigidTransform su_world_pose(const KinematicChain& chain, const SuParams& phi,
                             const Eigen::VectorXd& q) {
  if (phi.host_joint < 1 || phi.host_joint > chain.size())
    throw InvalidArgument("host joint " + std::to_string(phi.host_joint) + " outside chain of " +
                          std::to_string(chain.size()) + " joints");
  const auto frames = chain_fk(chain, q);
  return chain.base_frame * frames[phi.host_joint - 1] * su_transform(phi);
}

Eigen::VectorXd reference_configuration(const KinematicChain& chain) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(chain.size()));
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto [lo, hi] = chain.rows[i].joint_limits;
    q[static_cast<Eigen::Index>(i)] = std::clamp(0.0, lo, hi);
  }
  return q;
}

KinematicChain example_7dof_chain() {
  constexpr double half_pi = std::numbers::pi / 2.0;
  KinematicChain chain;
  chain.rows = {
      {.d = 0.333, .theta_offset = 0.0, .a = 0.0, .alpha = 0.0, .joint_limits = {-2.8973, 2.8973}, .velocity_limit = 2.175},
      {.d = 0.0, .theta_offset = 0.0, .a = 0.0, .alpha = -half_pi, .joint_limits = {-1.7628, 1.7628}, .velocity_limit = 2.175},
      {.d = 0.316, .theta_offset = 0.0, .a = 0.0, .alpha = half_pi, .joint_limits = {-2.8973, 2.8973}, .velocity_limit = 2.175},
      {.d = 0.0, .theta_offset = 0.0, .a = 0.0825, .alpha = half_pi, .joint_limits = {-3.0718, -0.0698}, .velocity_limit = 2.175},
      {.d = 0.384, .theta_offset = 0.0, .a = -0.0825, .alpha = -half_pi, .joint_limits = {-2.8973, 2.8973}, .velocity_limit = 2.61},
      {.d = 0.0, .theta_offset = 0.0, .a = 0.0, .alpha = half_pi, .joint_limits = {-0.0175, 3.7525}, .velocity_limit = 2.61},
      {.d = 0.0, .theta_offset = 0.0, .a = 0.088, .alpha = half_pi, .joint_limits = {-2.8973, 2.8973}, .velocity_limit = 2.61},
  };
  return chain;
}

}  // namespace skincal
