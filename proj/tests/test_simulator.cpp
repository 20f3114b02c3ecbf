#include "skincal/calibration.hpp"
#include "skincal/errors.hpp"
#include "skincal/simulator.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

namespace skincal {
namespace {

constexpr double kPi = std::numbers::pi;

NoiseModel noiseless() { return NoiseModel{0.0, 0}; }

TEST(SamplePoses, SixteenPosesWithinLimits) {
  const KinematicChain chain = example_7dof_chain();
  const auto poses = sample_poses(chain, 16, 7);
  ASSERT_EQ(poses.size(), 16u);
  for (const auto& q : poses) {
    ASSERT_EQ(q.size(), 7);
    EXPECT_NO_THROW(check_limits(chain, q));
  }
}

TEST(SamplePoses, DegenerateLimitsGiveTheFixedPose) {
  KinematicChain chain;
  chain.rows = {DhRow{}, DhRow{}};
  chain.rows[0].joint_limits = {0.3, 0.3};
  chain.rows[1].joint_limits = {-1.2, -1.2};
  const auto poses = sample_poses(chain, 1, 3);
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_DOUBLE_EQ(poses[0][0], 0.3);
  EXPECT_DOUBLE_EQ(poses[0][1], -1.2);
}

TEST(SamplePoses, SeedDeterminesOutput) {
  const KinematicChain chain = example_7dof_chain();
  const auto a = sample_poses(chain, 16, 99);
  const auto b = sample_poses(chain, 16, 99);
  const auto c = sample_poses(chain, 16, 100);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(a[0], c[0]);
}

TEST(PlaceSus, OneUnitPerHostFromSecondJoint) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 5);
  ASSERT_EQ(units.size(), 6u);
  for (std::size_t i = 0; i < units.size(); ++i) {
    EXPECT_EQ(units[i].host_joint, i + 2);
    EXPECT_LE(std::abs(units[i].d_v), 0.15);
    EXPECT_LE(std::abs(units[i].d_su), 0.15);
    EXPECT_GE(units[i].a_su, 0.0);
    EXPECT_LE(units[i].a_su, 0.15);
  }
}

TEST(PlaceSus, EmptyAndTooMany) {
  const KinematicChain chain = example_7dof_chain();
  EXPECT_TRUE(place_sus(chain, 0, 5).empty());
  EXPECT_THROW(place_sus(chain, 7, 5), InvalidArgument);
}

TEST(PlaceSus, SeedDeterminesOutput) {
  const KinematicChain chain = example_7dof_chain();
  const auto a = place_sus(chain, 6, 5);
  const auto b = place_sus(chain, 6, 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].d_v, b[i].d_v);
    EXPECT_EQ(a[i].theta_v, b[i].theta_v);
    EXPECT_EQ(a[i].d_su, b[i].d_su);
    EXPECT_EQ(a[i].theta_su, b[i].theta_su);
    EXPECT_EQ(a[i].a_su, b[i].a_su);
    EXPECT_EQ(a[i].alpha_su, b[i].alpha_su);
  }
}

TEST(SimulateStatic, IdentityMountAtZeroPose) {
  KinematicChain chain;
  chain.rows = {DhRow{0.3, 0, 0, 0}, DhRow{0, 0, 0, 0}};
  SuParams phi;
  phi.host_joint = 2;
  const auto samples = simulate_static(chain, {phi}, {Eigen::VectorXd::Zero(2)}, noiseless());
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_LT((samples[0].accel[0] - Vec3(0, 0, 9.81)).norm(), 1e-15);
}

TEST(SimulateStatic, NoiseFreeMatchesModel) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 1);
  const auto poses = sample_poses(chain, 16, 1);
  const auto samples = simulate_static(chain, units, poses, noiseless());
  for (std::size_t p = 0; p < poses.size(); ++p)
    for (std::size_t k = 0; k < units.size(); ++k)
      EXPECT_EQ(samples[p].accel[k], static_accel(chain, units[k], poses[p]));
}

TEST(SimulateStatic, NoiseHasRequestedSpread) {
  KinematicChain chain;
  chain.rows = {DhRow{}, DhRow{}};
  SuParams phi;
  phi.host_joint = 2;
  const std::vector<Eigen::VectorXd> poses(10000, Eigen::VectorXd::Zero(2));
  const auto samples = simulate_static(chain, {phi}, poses, NoiseModel{0.05, 17});
  const Vec3 clean(0, 0, 9.81);
  for (int axis = 0; axis < 3; ++axis) {
    double sum = 0, sum_sq = 0;
    for (const auto& s : samples) {
      const double e = s.accel[0][axis] - clean[axis];
      sum += e;
      sum_sq += e * e;
    }
    const double n = static_cast<double>(samples.size());
    const double sd = std::sqrt((sum_sq - sum * sum / n) / (n - 1));
    EXPECT_NEAR(sd, 0.05, 0.2 * 0.05) << "axis " << axis;
  }
}

TEST(SimulateDynamic, ZeroAmplitudeReadsStatic) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 2);
  const auto poses = sample_poses(chain, 3, 2);
  ExcitationProfile still;
  still.amplitude = 0.0;
  const auto stat = simulate_static(chain, units, poses, noiseless());
  const auto dyn = simulate_dynamic(chain, units, poses, {still}, noiseless());
  ASSERT_EQ(dyn.size(), poses.size() * chain.size());
  for (const auto& s : dyn)
    for (std::size_t k = 0; k < units.size(); ++k)
      EXPECT_LT((s.selected[k] - stat[s.pose_id].accel[k]).norm(), 1e-12);
}

TEST(SimulateDynamic, SelectedReadingIsAtAccelerationPeak) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 3);
  const auto poses = sample_poses(chain, 4, 3);
  const ExcitationProfile profile{2.0, 0.5, 2.0, 2.0, 100.0};
  const auto dyn = simulate_dynamic(chain, units, poses, {profile}, noiseless());
  const double omega = 2 * kPi * 0.5;
  for (const auto& s : dyn) {
    ASSERT_EQ(s.t.size(), 200u);
    EXPECT_EQ(s.selected_index, 0u);
    EXPECT_DOUBLE_EQ(s.t[0], 0.0);
    EXPECT_LE(std::abs(s.amplitude), std::min(2.0, chain.rows[s.excited_joint - 1].velocity_limit));
    EXPECT_NEAR(s.qddot_d[0], s.amplitude * omega, 1e-12);
    EXPECT_DOUBLE_EQ(s.qdot_d[0], 0.0);

    JointState state = JointState::at_rest(s.q);
    state.qddot[static_cast<Eigen::Index>(s.excited_joint - 1)] = s.amplitude * omega;
    for (std::size_t k = 0; k < units.size(); ++k) {
      const Vec3 expected = s.excited_joint <= units[k].host_joint
                                ? total_accel(chain, units[k], state, s.excited_joint)
                                : static_accel(chain, units[k], s.q);
      EXPECT_LT((s.selected[k] - expected).norm(), 1e-12);
    }
  }
}

TEST(SimulateDynamic, TrajectoriesStayInsideLimits) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 4);
  const auto poses = sample_poses(chain, 16, 4);
  const auto dyn = simulate_dynamic(chain, units, poses, {ExcitationProfile{}}, noiseless());
  for (const auto& s : dyn) {
    const auto [lo, hi] = chain.rows[s.excited_joint - 1].joint_limits;
    for (double q : s.q_d) {
      EXPECT_GE(q, lo);
      EXPECT_LE(q, hi);
    }
  }
}

TEST(SimulateDynamic, DistalExcitationIsGravityOnly) {
  const KinematicChain chain = example_7dof_chain();
  SuParams phi;
  phi.host_joint = 2;
  phi.a_su = 0.1;
  phi.d_su = 0.05;
  const auto poses = sample_poses(chain, 2, 6);
  const auto dyn = simulate_dynamic(chain, {phi}, poses, {ExcitationProfile{}}, noiseless());
  for (const auto& s : dyn) {
    if (s.excited_joint <= 2) continue;
    for (const auto& a : s.accel_series[0]) EXPECT_LT((a - static_accel(chain, phi, s.q)).norm(), 1e-12);
  }
}

TEST(FitAmplitude, FlipsOrShrinksNearLimits) {
  DhRow row;
  row.joint_limits = {-1.0, 1.0};
  row.velocity_limit = 2.5;
  ExcitationProfile profile;  // excursion 2A/omega = 4/pi
  EXPECT_DOUBLE_EQ(fit_amplitude(row, -1.0, profile), 2.0);
  EXPECT_DOUBLE_EQ(fit_amplitude(row, 1.0, profile), -2.0);
  const double a = fit_amplitude(row, 0.0, profile);
  EXPECT_GT(a, 0.0);
  EXPECT_LE(2 * a / kPi, 1.0);
  row.velocity_limit = 1.0;
  EXPECT_DOUBLE_EQ(fit_amplitude(row, -1.0, profile), 1.0);
}

TEST(GenerateDataset, OracleClosure) {
  const KinematicChain chain = example_7dof_chain();
  GenerateOptions options;
  options.seed = 8;
  options.noise.accel_sigma = 0.0;
  const Dataset ds = generate_dataset(chain, options);
  ASSERT_TRUE(ds.ground_truth.has_value());
  ASSERT_EQ(ds.units.size(), 6u);
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    const SuParams& truth = (*ds.ground_truth)[k];
    EXPECT_EQ(ds.units[k].host_joint, truth.host_joint);
    EXPECT_LE(static_error(truth, chain, ds.static_samples, k), 1e-12);
    EXPECT_LE(dynamic_error(truth, chain, ds.dynamic_samples, k), 1e-12);
  }
}

TEST(GenerateDataset, SimulatorPoseRoundTrip) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 9);
  const auto q = sample_poses(chain, 1, 9).front();
  const auto frames = chain_fk(chain, q);
  for (const auto& u : units) {
    const RigidTransform expected = frames[u.host_joint - 1] * su_transform(u);
    EXPECT_LT(testing::max_abs_diff(su_world_pose(chain, u, q), expected), 1e-12);
  }
}

TEST(Dataset, UnitLookup) {
  Dataset ds;
  ds.units = {{1, 2}, {4, 5}};
  EXPECT_EQ(ds.unit_index(4), 1u);
  EXPECT_THROW(ds.unit_index(2), LookupError);
}

TEST(ExcitationProfile, Validation) {
  ExcitationProfile p;
  EXPECT_NO_THROW(p.validate());
  p.frequency = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.amplitude = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

}  // namespace
}  // namespace skincal
