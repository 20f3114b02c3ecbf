#include "skincal/calibration.hpp"

#include "skincal/errors.hpp"
#include "skincal/metrics.hpp"
#include "skincal/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace skincal {

namespace {

constexpr std::uint64_t kRestartStream = 5;
constexpr double kFlatTolerance = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::VectorXd lower(std::initializer_list<Interval> list) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(list.size()));
  Eigen::Index i = 0;
  for (const auto& iv : list) v[i++] = iv.lo;
  return v;
}

Eigen::VectorXd upper(std::initializer_list<Interval> list) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(list.size()));
  Eigen::Index i = 0;
  for (const auto& iv : list) v[i++] = iv.hi;
  return v;
}

RotationParams rotation_of(const Eigen::VectorXd& x) { return {x[0], x[1], x[2]}; }
TranslationParams translation_of(const Eigen::VectorXd& x) { return {x[0], x[1], x[2]}; }

// Full vector in tuple order (d_v, theta_v, d_su, theta_su, a_su, alpha_su).
SuParams full_of(const Eigen::VectorXd& x, std::size_t host) {
  return {.d_v = x[0], .theta_v = x[1], .d_su = x[2], .theta_su = x[3], .a_su = x[4], .alpha_su = x[5],
          .host_joint = host};
}

NelderMeadOptions local_options(const CalibConfig& config) {
  return {.xtol = config.param_delta_threshold,
          .ftol = config.value_tolerance,
          .ftarget = -std::numeric_limits<double>::infinity(),
          .max_iterations = config.max_iterations};
}

// Every required (pose, joint) pair must have an excitation record. Poses are
// those of the static set plus any appearing in the dynamic set.
void check_dynamic_coverage(const Dataset& ds, std::size_t host_joint) {
  std::set<std::size_t> poses;
  for (const auto& s : ds.static_samples) poses.insert(s.pose_id);
  for (const auto& s : ds.dynamic_samples) poses.insert(s.pose_id);
  std::set<std::pair<std::size_t, std::size_t>> have;
  for (const auto& s : ds.dynamic_samples) have.emplace(s.pose_id, s.excited_joint);
  for (std::size_t p : poses)
    for (std::size_t d : dynamic_error_joints(host_joint))
      if (!have.count({p, d})) throw DataIncomplete(p, d);
}

template <typename Fn>
UnitCalibration guarded(const SkinUnitInfo& info, Fn&& body) {
  UnitCalibration out;
  out.su_id = info.su_id;
  out.host_joint = info.host_joint;
  try {
    body(out);
  } catch (const DataIncomplete& e) {
    out.error = e.what();
    out.error_kind = "data_incomplete";
  } catch (const LimitViolation& e) {
    out.error = e.what();
    out.error_kind = "limit_violation";
  } catch (const InvalidArgument& e) {
    out.error = e.what();
    out.error_kind = "invalid_argument";
  } catch (const std::exception& e) {
    out.error = e.what();
    out.error_kind = "error";
  }
  if (out.error) {
    out.estimate.reset();
    out.converged = false;
  }
  return out;
}

void finish_unit(UnitCalibration& out, const SuParams& raw, const Dataset& ds, std::size_t unit,
                 const CalibConfig& config) {
  const SuParams phi = raw.normalized();
  out.estimate = phi;
  out.static_error = static_error(phi, ds.chain, ds.static_samples, unit, ds.gravity);
  out.dynamic_error = dynamic_error(phi, ds.chain, ds.dynamic_samples, unit, ds.gravity, config.tangential);
  if (ds.ground_truth) {
    const SuParams& truth = (*ds.ground_truth)[unit];
    out.position_error_cm = position_error(phi, truth, ds.chain);
    out.quaternion_distance = quaternion_distance(phi, truth, ds.chain);
  }
}

template <typename Task>
std::vector<UnitCalibration> run_units(const Dataset& ds, const CalibConfig& config, Task&& task) {
  std::vector<UnitCalibration> results(ds.units.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(config.threads ? config.threads : default_thread_count(), ds.units.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < ds.units.size(); k = next++) results[k] = task(k);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  return results;
}

void validate_dataset(const Dataset& ds) {
  ds.chain.validate();
  if (ds.static_samples.empty()) throw InvalidArgument("dataset has no static samples");
}

}  // namespace

void CalibConfig::validate() const {
  if (!(static_error_threshold > 0.0) || !(param_delta_threshold > 0.0))
    throw InvalidArgument("calibration thresholds must be positive");
  if (!(value_tolerance >= 0.0)) throw InvalidArgument("value tolerance must be nonnegative");
  if (restarts < 1) throw InvalidArgument("at least one restart is required");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  for (const Interval* iv : {&bounds.theta_v, &bounds.d_v, &bounds.theta_su, &bounds.d_su, &bounds.a_su, &bounds.alpha_su})
    if (!(iv->lo <= iv->hi) || !std::isfinite(iv->lo) || !std::isfinite(iv->hi))
      throw InvalidArgument("invalid parameter bounds");
}

SuParams compose(const RotationParams& rot, const TranslationParams& trans, std::size_t host_joint) {
  return {.d_v = trans.d_v, .theta_v = rot.theta_v, .d_su = trans.d_su, .theta_su = rot.theta_su,
          .a_su = trans.a_su, .alpha_su = rot.alpha_su, .host_joint = host_joint};
}

std::vector<std::size_t> dynamic_error_joints(std::size_t host_joint) {
  std::vector<std::size_t> joints;
  for (std::size_t d = host_joint > 2 ? host_joint - 2 : 1; d <= host_joint; ++d) joints.push_back(d);
  return joints;
}

StaticErrorFunction::StaticErrorFunction(const KinematicChain& chain, std::span<const StaticSample> samples,
                                         std::size_t unit, std::size_t host_joint,
                                         const GravityModel& gravity)
    : gravity_(gravity.g_base) {
  if (samples.empty()) throw InvalidArgument("static error needs at least one sample");
  if (host_joint < 1 || host_joint > chain.size()) throw InvalidArgument("host joint outside chain");
  for (const auto& s : samples) {
    if (unit >= s.accel.size()) throw InvalidArgument("static sample lacks a reading for this unit");
    base_R_joint_.push_back(chain_fk(chain, s.q)[host_joint - 1].rotation);
    measured_.push_back(s.accel[unit]);
  }
}

double StaticErrorFunction::operator()(const SuParams& phi) const {
  const Mat3 joint_R_su = su_transform(phi).rotation;
  double sum = 0.0;
  for (std::size_t p = 0; p < measured_.size(); ++p)
    sum += (base_R_joint_[p] * joint_R_su * measured_[p] - gravity_).squaredNorm();
  return sum / static_cast<double>(measured_.size());
}

DynamicErrorFunction::DynamicErrorFunction(const KinematicChain& chain,
                                           std::span<const DynamicSample> samples, std::size_t unit,
                                           std::size_t host_joint, const GravityModel& gravity,
                                           TangentialMethod method)
    : gravity_(gravity), method_(method) {
  if (samples.empty()) throw InvalidArgument("dynamic error needs at least one sample");
  if (host_joint < 1 || host_joint > chain.size()) throw InvalidArgument("host joint outside chain");
  std::map<std::pair<std::size_t, std::size_t>, const DynamicSample*> index;
  std::set<std::size_t> poses;
  for (const auto& s : samples) {
    index.emplace(std::make_pair(s.pose_id, s.excited_joint), &s);
    poses.insert(s.pose_id);
  }
  for (std::size_t p : poses) {
    for (std::size_t d : dynamic_error_joints(host_joint)) {
      auto it = index.find({p, d});
      if (it == index.end()) throw DataIncomplete(p, d);
      const DynamicSample& s = *it->second;
      if (unit >= s.selected.size()) throw InvalidArgument("dynamic sample lacks a reading for this unit");
      const JointState state = s.selected_state();
      const auto frames = chain_fk(chain, state.q);
      const RigidTransform& base_T_host = frames[host_joint - 1];
      const auto di = static_cast<Eigen::Index>(d - 1);
      terms_.push_back({.base_R_host = base_T_host.rotation,
                        .joint_T_host = frames[d - 1].inverse() * base_T_host,
                        .motion = {state.qdot[di], state.qddot[di]},
                        .measured = s.selected[unit]});
    }
  }
  pose_count_ = poses.size();
}

double DynamicErrorFunction::operator()(const SuParams& phi) const {
  const RigidTransform host_T_su = su_transform(phi);
  double sum = 0.0;
  for (const Term& t : terms_) {
    const Vec3 predicted = reading_from_geometry(t.base_R_host * host_T_su.rotation, t.joint_T_host * host_T_su,
                                                 t.motion, gravity_, method_);
    sum += (t.measured - predicted).squaredNorm();
  }
  return sum / static_cast<double>(pose_count_);
}

double static_error(const SuParams& phi, const KinematicChain& chain, std::span<const StaticSample> samples,
                    std::size_t unit, const GravityModel& gravity) {
  return StaticErrorFunction(chain, samples, unit, phi.host_joint, gravity)(phi);
}

double dynamic_error(const SuParams& phi, const KinematicChain& chain, std::span<const DynamicSample> samples,
                     std::size_t unit, const GravityModel& gravity, TangentialMethod method) {
  return DynamicErrorFunction(chain, samples, unit, phi.host_joint, gravity, method)(phi);
}

StageReport multistart_minimize(const Objective& f, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                std::size_t restarts, double early_exit, const NelderMeadOptions& local,
                                std::mt19937_64& rng) {
  const auto start = Clock::now();
  StageReport report;
  report.residual = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd width = hi - lo;
  Eigen::VectorXd step = 0.1 * width;
  for (Eigen::Index i = 0; i < step.size(); ++i)
    if (step[i] <= 0.0) step[i] = 0.1;

  double probe_min = std::numeric_limits<double>::infinity();
  double probe_max = -std::numeric_limits<double>::infinity();
  auto probe = [&](double v) {
    probe_min = std::min(probe_min, v);
    probe_max = std::max(probe_max, v);
  };

  for (std::size_t r = 0; r < restarts; ++r) {
    Eigen::VectorXd x0(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x0[i] = uniform(rng, lo[i], hi[i]);
    probe(f(x0));
    if (r == 0) {
      for (Eigen::Index i = 0; i < x0.size(); ++i) {
        Eigen::VectorXd xi = x0;
        xi[i] += step[i];
        probe(f(xi));
      }
    }
    const NelderMeadResult res = nelder_mead(f, x0, step, local);
    report.iterations += res.iterations;
    report.evaluations += res.evaluations;
    report.restart_residuals.push_back(res.value);
    if (res.value < report.residual) {
      report.residual = res.value;
      report.x = res.x;
      report.best_restart = r;
      report.converged = res.converged();
    }
    if (report.residual < early_exit) break;
  }
  report.flat_objective = probe_max - probe_min <= kFlatTolerance * std::max(1.0, std::abs(probe_min));
  if (report.flat_objective) report.converged = false;
  report.seconds = seconds_since(start);
  return report;
}

OrientationEstimate optimize_orientation(const KinematicChain& chain, std::span<const StaticSample> samples,
                                         std::size_t unit, std::size_t host_joint, const CalibConfig& config,
                                         std::mt19937_64& rng, const GravityModel& gravity) {
  const StaticErrorFunction error(chain, samples, unit, host_joint, gravity);
  const auto& b = config.bounds;
  auto objective = [&](const Eigen::VectorXd& x) {
    return error(compose(rotation_of(x), {}, host_joint));
  };
  OrientationEstimate out;
  out.report = multistart_minimize(objective, lower({b.theta_v, b.theta_su, b.alpha_su}),
                                   upper({b.theta_v, b.theta_su, b.alpha_su}), config.restarts,
                                   config.static_error_threshold, local_options(config), rng);
  out.rotation = rotation_of(out.report.x);
  return out;
}

PositionEstimate optimize_position(const KinematicChain& chain, std::span<const DynamicSample> samples,
                                   std::size_t unit, std::size_t host_joint, const RotationParams& rotation,
                                   const CalibConfig& config, std::mt19937_64& rng, const GravityModel& gravity) {
  const DynamicErrorFunction error(chain, samples, unit, host_joint, gravity, config.tangential);
  const auto& b = config.bounds;
  auto objective = [&](const Eigen::VectorXd& x) {
    return error(compose(rotation, translation_of(x), host_joint));
  };
  PositionEstimate out;
  out.report = multistart_minimize(objective, lower({b.d_v, b.d_su, b.a_su}), upper({b.d_v, b.d_su, b.a_su}),
                                   config.restarts, -std::numeric_limits<double>::infinity(),
                                   local_options(config), rng);
  out.translation = translation_of(out.report.x);
  return out;
}

bool CalibrationResult::all_converged() const {
  return std::all_of(units.begin(), units.end(), [](const UnitCalibration& u) { return u.converged && !u.error; });
}

bool CalibrationResult::any_data_error() const {
  return std::any_of(units.begin(), units.end(), [](const UnitCalibration& u) { return u.error.has_value(); });
}

std::mt19937_64 unit_stream(std::uint64_t seed, std::size_t su_id) {
  return make_stream(seed, kRestartStream, su_id);
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("SKINCAL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CalibrationResult calibrate(const Dataset& dataset, const CalibConfig& config) {
  config.validate();
  validate_dataset(dataset);
  const auto start = Clock::now();
  CalibrationResult result;
  result.seed = config.rng_seed;
  result.units = run_units(dataset, config, [&](std::size_t k) {
    const SkinUnitInfo& info = dataset.units[k];
    return guarded(info, [&](UnitCalibration& out) {
      check_dynamic_coverage(dataset, info.host_joint);
      auto rng = unit_stream(config.rng_seed, info.su_id);
      const auto orientation = optimize_orientation(dataset.chain, dataset.static_samples, k, info.host_joint,
                                                    config, rng, dataset.gravity);
      const auto position = optimize_position(dataset.chain, dataset.dynamic_samples, k, info.host_joint,
                                              orientation.rotation, config, rng, dataset.gravity);
      out.iterations_static = orientation.report.iterations;
      out.iterations_dynamic = position.report.iterations;
      out.restart_residuals_static = orientation.report.restart_residuals;
      out.restart_residuals_dynamic = position.report.restart_residuals;
      out.seconds_static = orientation.report.seconds;
      out.seconds_dynamic = position.report.seconds;
      out.flat_objective = orientation.report.flat_objective || position.report.flat_objective;
      out.converged = orientation.report.converged && position.report.converged;
      finish_unit(out, compose(orientation.rotation, position.translation, info.host_joint), dataset, k, config);
    });
  });
  result.wall_seconds = seconds_since(start);
  return result;
}

CalibrationResult calibrate_monolithic(const Dataset& dataset, const CalibConfig& config) {
  config.validate();
  validate_dataset(dataset);
  const auto start = Clock::now();
  CalibrationResult result;
  result.monolithic = true;
  result.seed = config.rng_seed;
  const auto& b = config.bounds;
  const Eigen::VectorXd lo = lower({b.d_v, b.theta_v, b.d_su, b.theta_su, b.a_su, b.alpha_su});
  const Eigen::VectorXd hi = upper({b.d_v, b.theta_v, b.d_su, b.theta_su, b.a_su, b.alpha_su});
  result.units = run_units(dataset, config, [&](std::size_t k) {
    const SkinUnitInfo& info = dataset.units[k];
    return guarded(info, [&](UnitCalibration& out) {
      check_dynamic_coverage(dataset, info.host_joint);
      auto rng = unit_stream(config.rng_seed, info.su_id);
      const StaticErrorFunction es(dataset.chain, dataset.static_samples, k, info.host_joint, dataset.gravity);
      const DynamicErrorFunction ed(dataset.chain, dataset.dynamic_samples, k, info.host_joint, dataset.gravity,
                                    config.tangential);
      auto objective = [&](const Eigen::VectorXd& x) {
        const SuParams phi = full_of(x, info.host_joint);
        return es(phi) + ed(phi);
      };
      // The combined objective contains E_d, which carries no error threshold.
      const StageReport report = multistart_minimize(objective, lo, hi, config.restarts,
                                                     -std::numeric_limits<double>::infinity(),
                                                     local_options(config), rng);
      out.iterations_static = report.iterations;
      out.restart_residuals_static = report.restart_residuals;
      out.seconds_static = report.seconds;
      out.flat_objective = report.flat_objective;
      out.converged = report.converged;
      finish_unit(out, full_of(report.x, info.host_joint), dataset, k, config);
    });
  });
  result.wall_seconds = seconds_since(start);
  return result;
}

}  // namespace skincal
