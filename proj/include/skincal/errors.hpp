#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skincal {

/// Thrown on malformed or non-finite inputs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A joint angle fell outside the chain's limits. `joint()` is one-based.
class LimitViolation : public std::out_of_range {
 public:
  LimitViolation(std::size_t joint, double value, double lo, double hi);
  std::size_t joint() const { return joint_; }

 private:
  std::size_t joint_;
};

/// Excitation data required by the dynamic error is missing.
class DataIncomplete : public std::runtime_error {
 public:
  DataIncomplete(std::size_t pose_id, std::size_t joint);
  std::size_t pose_id() const { return pose_id_; }
  std::size_t joint() const { return joint_; }

 private:
  std::size_t pose_id_;
  std::size_t joint_;
};

/// Unknown skin-unit id.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A dataset or result document does not match the expected layout.
/// `path()` is a JSON pointer to the offending element.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace skincal
