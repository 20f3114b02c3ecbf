#include "skincal/errors.hpp"

#include <sstream>

namespace skincal {

namespace {
std::string limit_message(std::size_t joint, double value, double lo, double hi) {
  std::ostringstream os;
  os << "joint " << joint << " value " << value << " outside limits [" << lo << ", " << hi << "]";
  return os.str();
}
}  // namespace

LimitViolation::LimitViolation(std::size_t joint, double value, double lo, double hi)
    : std::out_of_range(limit_message(joint, value, lo, hi)), joint_(joint) {}

DataIncomplete::DataIncomplete(std::size_t pose_id, std::size_t joint)
    : std::runtime_error("missing dynamic sample for pose " + std::to_string(pose_id) +
                         ", excited joint " + std::to_string(joint)),
      pose_id_(pose_id),
      joint_(joint) {}

SchemaError::SchemaError(std::string path, const std::string& what)
    : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

}  // namespace skincal
