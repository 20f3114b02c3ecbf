#pragma once

// Accuracy of estimated skin-unit poses against ground truth, compared in
// the world frame because DH tuples are not unique.

#include "skincal/kinematics.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace skincal {

struct Dataset;
struct CalibrationResult;

/// Distance between estimated and true unit positions in centimeters, at
/// `reference_q` (defaults to the clamped zero configuration).
double position_error(const SuParams& est, const SuParams& truth, const KinematicChain& chain,
                      const std::optional<Eigen::VectorXd>& reference_q = std::nullopt);

/// min(|q_e - q_t|, |q_e + q_t|) over the unit quaternions of the world
/// orientations.
double quaternion_distance(const SuParams& est, const SuParams& truth, const KinematicChain& chain,
                           const std::optional<Eigen::VectorXd>& reference_q = std::nullopt);

double quaternion_distance(const Mat3& a, const Mat3& b);

struct SuErrorReport {
  std::size_t su_id = 0;
  double position_error_cm = 0.0;
  double quaternion_distance = 0.0;
};

struct SummaryStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one value
  std::size_t count = 0;
};

SummaryStat summarize(const std::vector<double>& values);

struct AggregateRow {
  std::size_t su_id = 0;
  SummaryStat position_cm;
  SummaryStat quaternion;
};

struct AggregateReport {
  std::vector<AggregateRow> rows;  // ordered by su_id
  SummaryStat overall_position_cm;
  SummaryStat overall_quaternion;
  std::size_t trials = 0;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

/// Mean and sample standard deviation per unit and over every (trial, unit)
/// entry. Throws InvalidArgument when there are no trials.
AggregateReport aggregate_report(const std::vector<std::vector<SuErrorReport>>& trials);

/// Per-unit errors of one calibration run. Units without an estimate are
/// skipped. Throws InvalidArgument when the dataset has no ground truth.
std::vector<SuErrorReport> evaluate_result(const CalibrationResult& result, const Dataset& dataset);

}  // namespace skincal
