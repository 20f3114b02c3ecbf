#include "skincal/avoidance.hpp"

#include "skincal/errors.hpp"

#include <cmath>
#include <string>

namespace skincal {

double repulsive_magnitude(double distance_mm) {
  if (!std::isfinite(distance_mm) || distance_mm < 0.0)
    throw InvalidArgument("proximity distance must be a nonnegative number");
  return distance_mm < kRepulsionCutoffMm ? std::exp(-distance_mm / kRepulsionCutoffMm) : 0.0;
}

Vec3 adjust_trajectory(const Vec3& velocity, const ProximityReading& reading, const RigidTransform& su_world_pose) {
  if (reading.distance_mm > kProximityRangeMm) throw InvalidArgument("proximity reading beyond sensor range");
  const double beta = repulsive_magnitude(reading.distance_mm);
  const Vec3 normal = su_world_pose.rotation.col(2).normalized();
  return velocity + beta * normal;
}

Vec3 adjust_trajectory(const Vec3& velocity, const ProximityReading& reading,
                       const std::map<std::size_t, RigidTransform>& su_world_poses) {
  auto it = su_world_poses.find(reading.su_id);
  if (it == su_world_poses.end()) throw LookupError("no calibrated pose for skin unit " + std::to_string(reading.su_id));
  return adjust_trajectory(velocity, reading, it->second);
}

}  // namespace skincal
