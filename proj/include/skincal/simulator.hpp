#pragma once

// Synthetic ground-truth data: random static poses, random skin-unit
// placements, and per-joint sinusoidal velocity excitation.

#include "skincal/accel_model.hpp"
#include "skincal/kinematics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace skincal {

/// Joint velocity profile qdot(t) = A sin(2 pi f t).
struct ExcitationProfile {
  double amplitude = 2.0;     // rad/s
  double frequency = 0.5;     // Hz
  double duration = 2.0;      // s
  double rest_time = 2.0;     // s, ideal rest between sequences
  double sample_rate = 100.0; // Hz

  void validate() const;
};

struct NoiseModel {
  double accel_sigma = 0.05;  // m/s², per axis
  std::uint64_t seed = 0;
};

/// Bounds for ground-truth placements; defaults mimic units mounted on the
/// link surface.
struct PlacementBounds {
  double max_abs_d = 0.15;
  double max_a = 0.15;
};

struct SkinUnitInfo {
  std::size_t su_id = 0;
  std::size_t host_joint = 1;  // one-based
};

struct StaticSample {
  std::size_t pose_id = 0;
  Eigen::VectorXd q;
  std::vector<Vec3> accel;  // one per skin unit, SU frame
};

struct DynamicSample {
  std::size_t pose_id = 0;
  std::size_t excited_joint = 1;  // one-based
  double amplitude = 0.0;         // effective, after limit clamping
  Eigen::VectorXd q;              // configuration at t = 0
  std::vector<double> t;
  std::vector<double> q_d;
  std::vector<double> qdot_d;
  std::vector<double> qddot_d;
  std::vector<std::vector<Vec3>> accel_series;  // [unit][time]
  std::size_t selected_index = 0;
  std::vector<Vec3> selected;  // one per skin unit

  /// Full joint state at the selected instant.
  JointState selected_state() const;
};

struct Dataset {
  GravityModel gravity;
  double sample_rate = 100.0;
  KinematicChain chain;
  std::vector<SkinUnitInfo> units;
  std::optional<std::vector<SuParams>> ground_truth;  // parallel to units
  std::vector<StaticSample> static_samples;
  std::vector<DynamicSample> dynamic_samples;

  /// Index into `units` for a skin-unit id; throws LookupError.
  std::size_t unit_index(std::size_t su_id) const;
};

/// `count` configurations drawn uniformly within the joint limits.
std::vector<Eigen::VectorXd> sample_poses(const KinematicChain& chain, std::size_t count,
                                          std::uint64_t seed);

/// One unit per host joint starting at joint 2. Throws InvalidArgument when
/// count exceeds N - 1.
std::vector<SuParams> place_sus(const KinematicChain& chain, std::size_t count,
                                std::uint64_t seed, const PlacementBounds& bounds = {});

std::vector<StaticSample> simulate_static(const KinematicChain& chain,
                                          const std::vector<SuParams>& units,
                                          const std::vector<Eigen::VectorXd>& poses,
                                          const NoiseModel& noise,
                                          const GravityModel& gravity = {});

/// Effective signed amplitude keeping q0 + ∫qdot inside the joint limits and
/// |A| within the velocity limit.
double fit_amplitude(const DhRow& row, double q0, const ExcitationProfile& profile);

/// `profiles` holds one profile per joint (or a single profile applied to
/// every joint). Throws InvalidArgument if a trajectory leaves the limits.
std::vector<DynamicSample> simulate_dynamic(const KinematicChain& chain,
                                            const std::vector<SuParams>& units,
                                            const std::vector<Eigen::VectorXd>& poses,
                                            const std::vector<ExcitationProfile>& profiles,
                                            const NoiseModel& noise,
                                            const GravityModel& gravity = {});

struct GenerateOptions {
  std::size_t poses = 16;
  std::size_t units = 6;
  std::uint64_t seed = 0;
  NoiseModel noise;
  ExcitationProfile profile;
  PlacementBounds placement;
  GravityModel gravity;
};

/// Full synthetic dataset including ground truth.
Dataset generate_dataset(const KinematicChain& chain, const GenerateOptions& options);

}  // namespace skincal
