#pragma once

// JSON encoding of datasets. All angles in radians, lengths in meters,
// accelerations in m/s². Joint indices are one-based.

#include "skincal/simulator.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace skincal {

using json = nlohmann::json;

json to_json(const RigidTransform& t);
json to_json(const DhRow& row);
json to_json(const SuParams& phi);
json to_json(const KinematicChain& chain);  // header fragment: chain + base_frame
json to_json(const Dataset& ds);

// Each decoder throws SchemaError with the JSON pointer of the first problem.
RigidTransform transform_from_json(const json& j, const std::string& path = "");
DhRow dh_row_from_json(const json& j, const std::string& path = "");
SuParams su_params_from_json(const json& j, const std::string& path = "");
KinematicChain chain_from_json(const json& j, const std::string& path = "");
Dataset dataset_from_json(const json& j);

/// Schema problems surface as SchemaError; unreadable files as
/// std::runtime_error.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& j, const std::filesystem::path& path);

}  // namespace skincal
