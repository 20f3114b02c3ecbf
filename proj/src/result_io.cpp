#include "skincal/result_io.hpp"

#include "skincal/errors.hpp"

namespace skincal {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }

const json& field(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child(path, key), "missing field");
  return *it;
}

template <typename T>
T get(const json& j, const std::string& path, const std::string& key) {
  try {
    return field(j, path, key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(child(path, key), e.what());
  }
}

}  // namespace

json to_json(const CalibrationResult& result, bool include_timings) {
  json units = json::array();
  for (const auto& u : result.units) {
    json ju = {{"su_id", u.su_id},
               {"host_joint", u.host_joint},
               {"estimate", u.estimate ? to_json(*u.estimate) : json(nullptr)},
               {"static_error", u.static_error},
               {"dynamic_error", u.dynamic_error},
               {"iterations", {{"static", u.iterations_static}, {"dynamic", u.iterations_dynamic}}},
               {"restart_residuals",
                {{"static", u.restart_residuals_static}, {"dynamic", u.restart_residuals_dynamic}}},
               {"converged", u.converged},
               {"flat_objective", u.flat_objective}};
    if (u.error) ju["error"] = {{"kind", u.error_kind.value_or("error")}, {"message", *u.error}};
    if (u.position_error_cm && u.quaternion_distance)
      ju["metrics"] = {{"position_error_cm", *u.position_error_cm},
                       {"quaternion_distance", *u.quaternion_distance}};
    if (include_timings) ju["timings"] = {{"static_seconds", u.seconds_static}, {"dynamic_seconds", u.seconds_dynamic}};
    units.push_back(std::move(ju));
  }
  json out = {{"monolithic", result.monolithic}, {"seed", result.seed}, {"units", units}};
  if (include_timings) out["wall_seconds"] = result.wall_seconds;
  return out;
}

json to_json(const ResultDocument& doc, bool include_timings) {
  json trials = json::array();
  for (const auto& r : doc.trials) trials.push_back(to_json(r, include_timings));
  return {{"header", to_json(doc.chain)}, {"trials", trials}};
}

CalibrationResult calibration_result_from_json(const json& j, const std::string& path) {
  CalibrationResult r;
  r.monolithic = get<bool>(j, path, "monolithic");
  r.seed = get<std::uint64_t>(j, path, "seed");
  if (j.contains("wall_seconds")) r.wall_seconds = get<double>(j, path, "wall_seconds");
  const std::string upath = child(path, "units");
  const json& units = field(j, path, "units");
  if (!units.is_array()) throw SchemaError(upath, "expected an array");
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string p = upath + "/" + std::to_string(i);
    const json& ju = units[i];
    UnitCalibration u;
    u.su_id = get<std::size_t>(ju, p, "su_id");
    u.host_joint = get<std::size_t>(ju, p, "host_joint");
    const json& est = field(ju, p, "estimate");
    if (!est.is_null()) u.estimate = su_params_from_json(est, child(p, "estimate"));
    u.static_error = get<double>(ju, p, "static_error");
    u.dynamic_error = get<double>(ju, p, "dynamic_error");
    u.converged = get<bool>(ju, p, "converged");
    u.flat_objective = get<bool>(ju, p, "flat_objective");
    if (ju.contains("iterations")) {
      u.iterations_static = get<std::size_t>(ju["iterations"], child(p, "iterations"), "static");
      u.iterations_dynamic = get<std::size_t>(ju["iterations"], child(p, "iterations"), "dynamic");
    }
    if (ju.contains("restart_residuals")) {
      const std::string rp = child(p, "restart_residuals");
      u.restart_residuals_static = get<std::vector<double>>(ju["restart_residuals"], rp, "static");
      u.restart_residuals_dynamic = get<std::vector<double>>(ju["restart_residuals"], rp, "dynamic");
    }
    if (ju.contains("error")) {
      u.error_kind = get<std::string>(ju["error"], child(p, "error"), "kind");
      u.error = get<std::string>(ju["error"], child(p, "error"), "message");
    }
    if (ju.contains("metrics")) {
      u.position_error_cm = get<double>(ju["metrics"], child(p, "metrics"), "position_error_cm");
      u.quaternion_distance = get<double>(ju["metrics"], child(p, "metrics"), "quaternion_distance");
    }
    if (ju.contains("timings")) {
      u.seconds_static = get<double>(ju["timings"], child(p, "timings"), "static_seconds");
      u.seconds_dynamic = get<double>(ju["timings"], child(p, "timings"), "dynamic_seconds");
    }
    if (u.estimate && u.estimate->host_joint != u.host_joint)
      throw SchemaError(child(p, "estimate/host_joint"), "disagrees with unit host_joint");
    r.units.push_back(std::move(u));
  }
  return r;
}

ResultDocument result_document_from_json(const json& j) {
  ResultDocument doc;
  doc.chain = chain_from_json(field(j, "", "header"), "/header");
  const json& trials = field(j, "", "trials");
  if (!trials.is_array() || trials.empty()) throw SchemaError("/trials", "expected a nonempty array");
  for (std::size_t i = 0; i < trials.size(); ++i)
    doc.trials.push_back(calibration_result_from_json(trials[i], "/trials/" + std::to_string(i)));
  return doc;
}

}  // namespace skincal
