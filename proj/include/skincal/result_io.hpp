#pragma once

// Calibration result documents: {header, trials: [...]}. The header repeats
// the chain so downstream tools can place units without the dataset.

#include "skincal/calibration.hpp"
#include "skincal/dataset_io.hpp"

#include <vector>

namespace skincal {

struct ResultDocument {
  KinematicChain chain;
  std::vector<CalibrationResult> trials;
};

/// Timings are omitted unless requested so that seeded runs serialize to
/// identical bytes.
json to_json(const CalibrationResult& result, bool include_timings = false);
json to_json(const ResultDocument& doc, bool include_timings = false);

CalibrationResult calibration_result_from_json(const json& j, const std::string& path = "");
ResultDocument result_document_from_json(const json& j);

}  // namespace skincal
