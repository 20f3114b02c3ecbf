#include "skincal/calibration.hpp"
#include "skincal/errors.hpp"
#include "skincal/metrics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace skincal {
namespace {

constexpr double kPi = std::numbers::pi;

const Dataset& clean_dataset() {
  static const Dataset ds = [] {
    GenerateOptions options;
    options.seed = 1;
    options.noise.accel_sigma = 0.0;
    return generate_dataset(example_7dof_chain(), options);
  }();
  return ds;
}

CalibConfig quick_config(std::uint64_t seed = 0) {
  CalibConfig config;
  config.rng_seed = seed;
  config.threads = 1;
  return config;
}

TEST(DynamicErrorJoints, ClampsAtFirstJoint) {
  EXPECT_EQ(dynamic_error_joints(1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(dynamic_error_joints(2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(dynamic_error_joints(5), (std::vector<std::size_t>{3, 4, 5}));
}

TEST(StaticError, FlippedMountSinglePose) {
  KinematicChain chain;
  chain.rows = {DhRow{}, DhRow{}};
  const StaticSample upright{0, Eigen::VectorXd::Zero(2), {Vec3(0, 0, 9.81)}};
  SuParams flipped;
  flipped.host_joint = 1;
  flipped.alpha_su = kPi;
  const std::vector<StaticSample> samples{upright};
  EXPECT_NEAR(static_error(flipped, chain, samples, 0), (2 * 9.81) * (2 * 9.81), 1e-9);
  EXPECT_NEAR(static_error(flipped, chain, samples, 0), 384.9444, 1e-9);
}

TEST(StaticError, EmptyInputIsRejected) {
  const std::vector<StaticSample> none;
  EXPECT_THROW(static_error(SuParams{}, example_7dof_chain(), none, 0), InvalidArgument);
}

TEST(StaticError, OracleZeroAndTranslationInvariance) {
  const Dataset& ds = clean_dataset();
  std::mt19937_64 rng(31);
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    const SuParams truth = (*ds.ground_truth)[k];
    const double base = static_error(truth, ds.chain, ds.static_samples, k);
    EXPECT_LE(base, 1e-12);
    for (int i = 0; i < 20; ++i) {
      SuParams moved = testing::random_su_params(rng, truth.host_joint);
      moved.theta_v = truth.theta_v;
      moved.theta_su = truth.theta_su;
      moved.alpha_su = truth.alpha_su;
      EXPECT_NEAR(static_error(moved, ds.chain, ds.static_samples, k), base, 1e-12);
    }
  }
}

TEST(Errors, DuplicatedPoseSetLeavesValueUnchanged) {
  const Dataset& ds = clean_dataset();
  std::mt19937_64 rng(32);
  std::vector<StaticSample> stat = ds.static_samples;
  std::vector<DynamicSample> dyn = ds.dynamic_samples;
  const std::size_t pose_count = ds.static_samples.size();
  for (auto s : ds.static_samples) {
    s.pose_id += pose_count;
    stat.push_back(s);
  }
  for (auto s : ds.dynamic_samples) {
    s.pose_id += pose_count;
    dyn.push_back(s);
  }
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    const SuParams phi = testing::random_su_params(rng, ds.units[k].host_joint);
    const double es = static_error(phi, ds.chain, ds.static_samples, k);
    const double ed = dynamic_error(phi, ds.chain, ds.dynamic_samples, k);
    EXPECT_GE(es, 0.0);
    EXPECT_GE(ed, 0.0);
    EXPECT_NEAR(static_error(phi, ds.chain, stat, k), es, 1e-12 * std::max(1.0, es));
    EXPECT_NEAR(dynamic_error(phi, ds.chain, dyn, k), ed, 1e-12 * std::max(1.0, ed));
  }
}

TEST(DynamicError, OracleZero) {
  const Dataset& ds = clean_dataset();
  for (std::size_t k = 0; k < ds.units.size(); ++k)
    EXPECT_LE(dynamic_error((*ds.ground_truth)[k], ds.chain, ds.dynamic_samples, k), 1e-12);
}

TEST(DynamicError, RadialOffsetMatchesModelReevaluation) {
  KinematicChain chain;
  chain.rows = {DhRow{0.3, 0, 0, 0}, DhRow{0, 0, 0.4, kPi / 2}};
  SuParams truth;
  truth.host_joint = 1;
  truth.a_su = 0.05;
  truth.d_su = 0.02;
  truth.alpha_su = 0.3;
  const std::vector<Eigen::VectorXd> poses{Eigen::Vector2d(0.2, -0.4)};
  ExcitationProfile profile;
  auto samples = simulate_dynamic(chain, {truth}, poses, {profile}, NoiseModel{0.0, 0});
  samples.resize(1);  // keep only the excitation of joint 1
  ASSERT_EQ(samples[0].excited_joint, 1u);

  SuParams moved = truth;
  moved.a_su += 0.10;
  const Vec3 predicted = total_accel(chain, moved, samples[0].selected_state(), 1);
  const double expected = (samples[0].selected[0] - predicted).squaredNorm();
  const double got = dynamic_error(moved, chain, samples, 0);
  EXPECT_GT(got, 0.0);
  EXPECT_NEAR(got, expected, 1e-12);
}

TEST(DynamicError, MissingExcitationNamesTheGap) {
  const Dataset& ds = clean_dataset();
  std::vector<DynamicSample> dyn;
  for (const auto& s : ds.dynamic_samples)
    if (!(s.pose_id == 3 && s.excited_joint == 5)) dyn.push_back(s);
  const std::size_t unit = ds.unit_index(5);  // hosted on joint 6, needs joints 4..6
  try {
    dynamic_error((*ds.ground_truth)[unit], ds.chain, dyn, unit);
    FAIL() << "expected DataIncomplete";
  } catch (const DataIncomplete& e) {
    EXPECT_EQ(e.pose_id(), 3u);
    EXPECT_EQ(e.joint(), 5u);
  }
  // Units that do not need joint 5 are unaffected.
  const std::size_t low = ds.unit_index(1);
  EXPECT_NO_THROW(dynamic_error((*ds.ground_truth)[low], ds.chain, dyn, low));
}

TEST(Errors, FiniteDifferencesAreConsistentUnderStepHalving) {
  const Dataset& ds = clean_dataset();
  std::mt19937_64 rng(33);
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    const SuParams phi = testing::random_su_params(rng, ds.units[k].host_joint);
    const StaticErrorFunction es(ds.chain, ds.static_samples, k, phi.host_joint, {});
    const DynamicErrorFunction ed(ds.chain, ds.dynamic_samples, k, phi.host_joint, {}, TangentialMethod::kAnalytic);
    for (int coord = 0; coord < 6; ++coord) {
      auto shifted = [&](double delta) {
        SuParams p = phi;
        double* fields[] = {&p.d_v, &p.theta_v, &p.d_su, &p.theta_su, &p.a_su, &p.alpha_su};
        *fields[coord] += delta;
        return p;
      };
      for (const std::function<double(const SuParams&)>& eval :
           {std::function<double(const SuParams&)>(es), std::function<double(const SuParams&)>(ed)}) {
        const double h = 1e-3;
        const double g1 = (eval(shifted(h)) - eval(shifted(-h))) / (2 * h);
        const double g2 = (eval(shifted(h / 2)) - eval(shifted(-h / 2))) / h;
        if (std::abs(g1) < 1e-6 && std::abs(g2) < 1e-6) continue;  // translation axes of E_s
        EXPECT_NEAR(g1 / g2, 1.0, 0.05) << "unit " << k << " coord " << coord;
      }
    }
  }
}

TEST(MultistartMinimize, BestResidualIsMinimumOverRestarts) {
  // Two separated wells; restarts land in either.
  auto f = [](const Eigen::VectorXd& x) {
    const double a = (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
    const double b = (x[0] + 1.0) * (x[0] + 1.0) + x[1] * x[1] + 0.5;
    return std::min(a, b);
  };
  std::mt19937_64 rng(34);
  const StageReport r = multistart_minimize(f, Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2), 8,
                                            -std::numeric_limits<double>::infinity(), {}, rng);
  ASSERT_EQ(r.restart_residuals.size(), 8u);
  const auto best = std::min_element(r.restart_residuals.begin(), r.restart_residuals.end());
  EXPECT_EQ(r.residual, *best);
  EXPECT_EQ(r.best_restart, static_cast<std::size_t>(best - r.restart_residuals.begin()));
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.flat_objective);
}

TEST(MultistartMinimize, EarlyExitStopsRestarting) {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  std::mt19937_64 rng(35);
  const StageReport r = multistart_minimize(f, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 10, 0.01, {}, rng);
  EXPECT_EQ(r.restart_residuals.size(), 1u);
}

TEST(MultistartMinimize, FlatObjectiveIsFlagged) {
  auto f = [](const Eigen::VectorXd&) { return 3.0; };
  std::mt19937_64 rng(36);
  const StageReport r = multistart_minimize(f, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 3,
                                            -std::numeric_limits<double>::infinity(), {}, rng);
  EXPECT_TRUE(r.flat_objective);
  EXPECT_FALSE(r.converged);
}

TEST(OptimizeOrientation, RecoversRotationFromCleanData) {
  const Dataset& ds = clean_dataset();
  const CalibConfig config = quick_config(4);
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    auto rng = unit_stream(config.rng_seed, ds.units[k].su_id);
    const auto est = optimize_orientation(ds.chain, ds.static_samples, k, ds.units[k].host_joint, config, rng);
    EXPECT_LT(est.report.residual, 1e-6) << "unit " << k;
    const SuParams truth = (*ds.ground_truth)[k];
    const SuParams phi = compose(est.rotation, {truth.d_v, truth.d_su, truth.a_su}, truth.host_joint);
    EXPECT_LT(quaternion_distance(phi, truth, ds.chain), 1e-3) << "unit " << k;
  }
}

TEST(OptimizeOrientation, SinglePoseStillReturnsAMinimizer) {
  const Dataset& ds = clean_dataset();
  const std::vector<StaticSample> one{ds.static_samples.front()};
  const CalibConfig config = quick_config(5);
  auto rng = unit_stream(5, 1);
  const auto est = optimize_orientation(ds.chain, one, 0, ds.units[0].host_joint, config, rng);
  EXPECT_LT(est.report.residual, 1e-6);
}

TEST(OptimizeOrientation, NoisyResidualNearNoiseFloor) {
  GenerateOptions options;
  options.seed = 2;
  options.noise.accel_sigma = 0.05;
  const Dataset ds = generate_dataset(example_7dof_chain(), options);
  const double floor = 3 * 0.05 * 0.05;
  const CalibConfig config = quick_config(6);
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    auto rng = unit_stream(config.rng_seed, ds.units[k].su_id);
    const auto est = optimize_orientation(ds.chain, ds.static_samples, k, ds.units[k].host_joint, config, rng);
    EXPECT_GT(est.report.residual, floor / 3) << "unit " << k;
    EXPECT_LT(est.report.residual, floor * 3) << "unit " << k;
  }
}

TEST(OptimizePosition, RecoversTranslationWithTrueRotation) {
  const Dataset& ds = clean_dataset();
  const CalibConfig config = quick_config(7);
  for (std::size_t k = 0; k < ds.units.size(); ++k) {
    const SuParams truth = (*ds.ground_truth)[k];
    auto rng = unit_stream(config.rng_seed, ds.units[k].su_id);
    const auto est = optimize_position(ds.chain, ds.dynamic_samples, k, truth.host_joint,
                                       {truth.theta_v, truth.theta_su, truth.alpha_su}, config, rng);
    const SuParams phi = compose({truth.theta_v, truth.theta_su, truth.alpha_su}, est.translation, truth.host_joint);
    EXPECT_LT(position_error(phi, truth, ds.chain), 0.1) << "unit " << k;
  }
}

TEST(OptimizePosition, ZeroAmplitudeIsFlat) {
  const KinematicChain chain = example_7dof_chain();
  const auto units = place_sus(chain, 6, 8);
  const auto poses = sample_poses(chain, 4, 8);
  ExcitationProfile still;
  still.amplitude = 0.0;
  const auto dyn = simulate_dynamic(chain, units, poses, {still}, NoiseModel{0.0, 0});
  const SuParams& truth = units[2];
  auto rng = unit_stream(0, 3);
  const auto est = optimize_position(chain, dyn, 2, truth.host_joint,
                                     {truth.theta_v, truth.theta_su, truth.alpha_su}, quick_config(), rng);
  EXPECT_TRUE(est.report.flat_objective);
  EXPECT_FALSE(est.report.converged);
}

TEST(Calibrate, CleanDataRecoversEveryUnit) {
  const Dataset& ds = clean_dataset();
  const CalibrationResult result = calibrate(ds, quick_config(9));
  ASSERT_EQ(result.units.size(), 6u);
  EXPECT_TRUE(result.all_converged());
  for (const auto& u : result.units) {
    ASSERT_TRUE(u.estimate && u.position_error_cm && u.quaternion_distance);
    EXPECT_LT(*u.position_error_cm, 0.2) << "su " << u.su_id;
    EXPECT_LT(*u.quaternion_distance, 0.005) << "su " << u.su_id;
    EXPECT_LT(u.static_error, 1e-6);
    EXPECT_LT(u.dynamic_error, 1e-6);
  }
}

TEST(Calibrate, ReportedErrorsReproduceFromEstimate) {
  const Dataset& ds = clean_dataset();
  const CalibrationResult result = calibrate(ds, quick_config(10));
  for (std::size_t k = 0; k < result.units.size(); ++k) {
    const auto& u = result.units[k];
    EXPECT_NEAR(static_error(*u.estimate, ds.chain, ds.static_samples, k), u.static_error, 1e-12);
    EXPECT_NEAR(dynamic_error(*u.estimate, ds.chain, ds.dynamic_samples, k), u.dynamic_error, 1e-12);
  }
}

TEST(Calibrate, WithoutGroundTruthOmitsMetrics) {
  Dataset ds = clean_dataset();
  ds.ground_truth.reset();
  const CalibrationResult result = calibrate(ds, quick_config(11));
  for (const auto& u : result.units) {
    EXPECT_TRUE(u.estimate.has_value());
    EXPECT_FALSE(u.position_error_cm.has_value());
    EXPECT_FALSE(u.quaternion_distance.has_value());
  }
}

TEST(Calibrate, SameSeedIsBitwiseIdenticalAcrossThreadCounts) {
  const Dataset& ds = clean_dataset();
  CalibConfig one = quick_config(12);
  CalibConfig many = one;
  many.threads = 4;
  const CalibrationResult a = calibrate(ds, one);
  const CalibrationResult b = calibrate(ds, many);
  for (std::size_t k = 0; k < a.units.size(); ++k) {
    const SuParams& x = *a.units[k].estimate;
    const SuParams& y = *b.units[k].estimate;
    EXPECT_EQ(x.d_v, y.d_v);
    EXPECT_EQ(x.theta_v, y.theta_v);
    EXPECT_EQ(x.d_su, y.d_su);
    EXPECT_EQ(x.theta_su, y.theta_su);
    EXPECT_EQ(x.a_su, y.a_su);
    EXPECT_EQ(x.alpha_su, y.alpha_su);
    EXPECT_EQ(a.units[k].restart_residuals_static, b.units[k].restart_residuals_static);
  }
}

TEST(Calibrate, MissingExcitationIsReportedPerUnit) {
  Dataset ds = clean_dataset();
  std::erase_if(ds.dynamic_samples, [](const DynamicSample& s) { return s.pose_id == 2 && s.excited_joint == 6; });
  const CalibrationResult result = calibrate(ds, quick_config(13));
  EXPECT_TRUE(result.any_data_error());
  for (const auto& u : result.units) {
    const bool needs_joint_6 = u.host_joint >= 6;
    EXPECT_EQ(u.error.has_value(), needs_joint_6) << "su " << u.su_id;
    if (needs_joint_6) {
      EXPECT_EQ(*u.error_kind, "data_incomplete");
      EXPECT_FALSE(u.estimate.has_value());
    }
  }
}

TEST(CalibrateMonolithic, RecoversCleanDataDeterministically) {
  const Dataset& ds = clean_dataset();
  const CalibrationResult a = calibrate_monolithic(ds, quick_config(14));
  const CalibrationResult b = calibrate_monolithic(ds, quick_config(14));
  EXPECT_TRUE(a.monolithic);
  double mean_pos = 0.0;
  for (std::size_t k = 0; k < a.units.size(); ++k) {
    ASSERT_TRUE(a.units[k].estimate);
    mean_pos += *a.units[k].position_error_cm / static_cast<double>(a.units.size());
    EXPECT_EQ(a.units[k].estimate->theta_v, b.units[k].estimate->theta_v);
    EXPECT_EQ(a.units[k].estimate->d_su, b.units[k].estimate->d_su);
  }
  EXPECT_LT(mean_pos, 0.2);
}

TEST(CalibrateMonolithic, TightCapIsFlaggedNonConverged) {
  const Dataset& ds = clean_dataset();
  CalibConfig config = quick_config(15);
  config.restarts = 1;
  config.max_iterations = 5;
  const CalibrationResult r = calibrate_monolithic(ds, config);
  EXPECT_FALSE(r.all_converged());
  for (const auto& u : r.units) EXPECT_FALSE(u.converged);
}

TEST(CalibConfig, RejectsInvalidSettings) {
  CalibConfig c;
  EXPECT_NO_THROW(c.validate());
  c.restarts = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.param_delta_threshold = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.bounds.d_v = {1.0, -1.0};
  EXPECT_THROW(c.validate(), InvalidArgument);
}

}  // namespace
}  // namespace skincal
