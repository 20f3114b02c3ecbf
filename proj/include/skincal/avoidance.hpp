#pragma once

// Proximity-driven trajectory adjustment using calibrated skin-unit poses.

#include "skincal/kinematics.hpp"

#include <cstddef>
#include <map>

namespace skincal {

inline constexpr double kRepulsionCutoffMm = 500.0;
inline constexpr double kProximityRangeMm = 4000.0;

struct ProximityReading {
  std::size_t su_id = 0;
  double distance_mm = 0.0;  // [0, 4000]
  double timestamp = 0.0;
};

/// exp(-d / 500) for d < 500 mm, else 0. The jump to zero at the cutoff is
/// intentional. Throws InvalidArgument for negative or non-finite d.
double repulsive_magnitude(double distance_mm);

/// T + beta * z, where z is the sensing (local z) axis of the unit in the
/// world frame.
Vec3 adjust_trajectory(const Vec3& velocity, const ProximityReading& reading, const RigidTransform& su_world_pose);

/// Looks up the unit's pose by id; throws LookupError if absent.
Vec3 adjust_trajectory(const Vec3& velocity, const ProximityReading& reading,
                       const std::map<std::size_t, RigidTransform>& su_world_poses);

}  // namespace skincal
