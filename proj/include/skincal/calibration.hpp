#pragma once

// Two-stage skin-unit calibration: orientation from static gravity readings,
// then position from single-joint excitation readings.

#include "skincal/accel_model.hpp"
#include "skincal/nelder_mead.hpp"
#include "skincal/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace skincal {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Ranges used to draw restart points. The local search itself is
/// unconstrained.
struct ParameterBounds {
  Interval theta_v{-3.141592653589793, 3.141592653589793};
  Interval d_v{-1.0, 1.0};
  Interval theta_su{-3.141592653589793, 3.141592653589793};
  Interval d_su{-1.0, 1.0};
  Interval a_su{0.0, 1.0};
  Interval alpha_su{-3.141592653589793, 3.141592653589793};
};

struct CalibConfig {
  ParameterBounds bounds;
  std::size_t restarts = 10;
  double static_error_threshold = 0.01;
  double param_delta_threshold = 0.001;
  /// Objective-value spread across the simplex required alongside the
  /// parameter tolerance before a local search stops.
  double value_tolerance = 1e-10;
  std::size_t max_iterations = 2000;
  std::uint64_t rng_seed = 0;
  /// Worker threads for per-unit parallelism; 0 reads SKINCAL_THREADS and
  /// falls back to the hardware concurrency.
  std::size_t threads = 0;
  TangentialMethod tangential = TangentialMethod::kAnalytic;

  void validate() const;
};

/// Parameter subsets. The rotation of ⁿT_k depends on (theta_v, theta_su,
/// alpha_su) only; the remaining three enter the translation.
struct RotationParams {
  double theta_v = 0.0;
  double theta_su = 0.0;
  double alpha_su = 0.0;
};

struct TranslationParams {
  double d_v = 0.0;
  double d_su = 0.0;
  double a_su = 0.0;
};

SuParams compose(const RotationParams& rot, const TranslationParams& trans, std::size_t host_joint);

/// Static error of unit `unit` (index into the per-sample readings):
/// mean over poses of |ᵇR_n ⁿR_k(phi) ᵏa^m − ᵇg|². Throws InvalidArgument on
/// empty input.
double static_error(const SuParams& phi, const KinematicChain& chain,
                    std::span<const StaticSample> samples, std::size_t unit,
                    const GravityModel& gravity = {});

/// Dynamic error: mean over poses of the squared residual between measured
/// and predicted readings, summed over the excited joints
/// max(1, n-2) .. n. Throws DataIncomplete naming the missing (pose, joint).
double dynamic_error(const SuParams& phi, const KinematicChain& chain,
                     std::span<const DynamicSample> samples, std::size_t unit,
                     const GravityModel& gravity = {},
                     TangentialMethod method = TangentialMethod::kAnalytic);

/// Joints whose excitation enters the dynamic error of a unit on `host_joint`.
std::vector<std::size_t> dynamic_error_joints(std::size_t host_joint);

/// Precomputed static error for one unit; repeated evaluation is cheap.
class StaticErrorFunction {
 public:
  StaticErrorFunction(const KinematicChain& chain, std::span<const StaticSample> samples,
                      std::size_t unit, std::size_t host_joint, const GravityModel& gravity);
  double operator()(const SuParams& phi) const;

 private:
  std::vector<Mat3> base_R_joint_;
  std::vector<Vec3> measured_;
  Vec3 gravity_;
};

/// Precomputed dynamic error for one unit.
class DynamicErrorFunction {
 public:
  DynamicErrorFunction(const KinematicChain& chain, std::span<const DynamicSample> samples,
                       std::size_t unit, std::size_t host_joint, const GravityModel& gravity,
                       TangentialMethod method);
  double operator()(const SuParams& phi) const;
  std::size_t pose_count() const { return pose_count_; }

 private:
  struct Term {
    Mat3 base_R_host;
    RigidTransform joint_T_host;
    ExcitedJointMotion motion;
    Vec3 measured;
  };
  std::vector<Term> terms_;
  std::size_t pose_count_ = 0;
  GravityModel gravity_;
  TangentialMethod method_;
};

/// Best-of-restarts bookkeeping for one optimization stage.
struct StageReport {
  Eigen::VectorXd x;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<double> restart_residuals;  // in restart order
  std::size_t best_restart = 0;
  bool converged = false;
  bool flat_objective = false;
  double seconds = 0.0;
};

/// Uniform restarts within [lo, hi] followed by unconstrained Nelder-Mead.
/// Stops early once the best residual falls below `early_exit` (pass -inf to
/// run every restart). Ties keep the lowest restart index.
StageReport multistart_minimize(const Objective& f, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, std::size_t restarts,
                                double early_exit, const NelderMeadOptions& local,
                                std::mt19937_64& rng);

struct OrientationEstimate {
  RotationParams rotation;
  StageReport report;
};

struct PositionEstimate {
  TranslationParams translation;
  StageReport report;
};

OrientationEstimate optimize_orientation(const KinematicChain& chain,
                                         std::span<const StaticSample> samples, std::size_t unit,
                                         std::size_t host_joint, const CalibConfig& config,
                                         std::mt19937_64& rng, const GravityModel& gravity = {});

PositionEstimate optimize_position(const KinematicChain& chain,
                                   std::span<const DynamicSample> samples, std::size_t unit,
                                   std::size_t host_joint, const RotationParams& rotation,
                                   const CalibConfig& config, std::mt19937_64& rng,
                                   const GravityModel& gravity = {});

struct UnitCalibration {
  std::size_t su_id = 0;
  std::size_t host_joint = 1;
  std::optional<SuParams> estimate;
  double static_error = 0.0;
  double dynamic_error = 0.0;
  std::size_t iterations_static = 0;  // monolithic runs report all iterations here
  std::size_t iterations_dynamic = 0;
  std::vector<double> restart_residuals_static;
  std::vector<double> restart_residuals_dynamic;
  bool converged = false;
  bool flat_objective = false;
  double seconds_static = 0.0;
  double seconds_dynamic = 0.0;
  std::optional<std::string> error;  // set when this unit could not be calibrated
  std::optional<std::string> error_kind;
  std::optional<double> position_error_cm;
  std::optional<double> quaternion_distance;
};

struct CalibrationResult {
  bool monolithic = false;
  std::uint64_t seed = 0;
  std::vector<UnitCalibration> units;
  double wall_seconds = 0.0;

  bool all_converged() const;
  bool any_data_error() const;
};

/// Per-unit random stream derived from the configured seed.
std::mt19937_64 unit_stream(std::uint64_t seed, std::size_t su_id);

CalibrationResult calibrate(const Dataset& dataset, const CalibConfig& config);

/// Joint minimization of E_s + E_d over all six parameters.
CalibrationResult calibrate_monolithic(const Dataset& dataset, const CalibConfig& config);

/// Thread count used when config.threads == 0.
std::size_t default_thread_count();

}  // namespace skincal
