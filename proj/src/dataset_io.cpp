#include "skincal/dataset_io.hpp"

#include "skincal/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace skincal {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t idx) { return path + "/" + std::to_string(idx); }

const json& field(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child(path, key), "missing field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "non-finite number");
  return v;
}

double number_field(const json& j, const std::string& path, const std::string& key) {
  return number(field(j, path, key), child(path, key));
}

std::size_t index_field(const json& j, const std::string& path, const std::string& key) {
  const json& v = field(j, path, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw SchemaError(child(path, key), "expected a nonnegative integer");
  return v.get<std::size_t>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(path, "expected a 3-vector");
  return {number(j[0], child(path, 0)), number(j[1], child(path, 1)), number(j[2], child(path, 2))};
}

Eigen::VectorXd vecx(const json& j, const std::string& path, std::size_t expected) {
  array(j, path);
  if (j.size() != expected)
    throw SchemaError(path, "expected " + std::to_string(expected) + " entries, got " +
                                std::to_string(j.size()));
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], child(path, i));
  return v;
}

std::vector<double> doubles(const json& j, const std::string& path) {
  array(j, path);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(path, i)));
  return out;
}

std::vector<Vec3> vec3_list(const json& j, const std::string& path, std::size_t expected) {
  array(j, path);
  if (j.size() != expected)
    throw SchemaError(path, "expected " + std::to_string(expected) + " readings, got " +
                                std::to_string(j.size()));
  std::vector<Vec3> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < expected; ++i) out.push_back(vec3(j[i], child(path, i)));
  return out;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json vec3_list_json(const std::vector<Vec3>& list) {
  json out = json::array();
  for (const auto& v : list) out.push_back(vec_json(v));
  return out;
}

}  // namespace

json to_json(const RigidTransform& t) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2)}));
  return {{"rotation", rows}, {"translation", vec_json(t.translation)}};
}

json to_json(const DhRow& row) {
  return {{"d", row.d},
          {"theta_offset", row.theta_offset},
          {"a", row.a},
          {"alpha", row.alpha},
          {"joint_limits", json::array({row.joint_limits.first, row.joint_limits.second})},
          {"velocity_limit", row.velocity_limit}};
}

json to_json(const SuParams& phi) {
  return {{"d_v", phi.d_v},         {"theta_v", phi.theta_v}, {"d_su", phi.d_su},
          {"theta_su", phi.theta_su}, {"a_su", phi.a_su},     {"alpha_su", phi.alpha_su},
          {"host_joint", phi.host_joint}};
}

json to_json(const KinematicChain& chain) {
  json rows = json::array();
  for (const auto& r : chain.rows) rows.push_back(to_json(r));
  return {{"chain", rows}, {"base_frame", to_json(chain.base_frame)}};
}

json to_json(const Dataset& ds) {
  json header = to_json(ds.chain);
  header["gravity"] = vec_json(ds.gravity.g_base);
  header["sample_rate"] = ds.sample_rate;
  json units = json::array();
  for (const auto& u : ds.units) units.push_back({{"su_id", u.su_id}, {"host_joint", u.host_joint}});
  header["skin_units"] = units;

  json out;
  out["header"] = header;
  if (ds.ground_truth) {
    json gt = json::array();
    for (const auto& phi : *ds.ground_truth) gt.push_back(to_json(phi));
    out["ground_truth"] = gt;
  }
  json stat = json::array();
  for (const auto& s : ds.static_samples)
    stat.push_back({{"pose_id", s.pose_id}, {"q", vec_json(s.q)}, {"accel", vec3_list_json(s.accel)}});
  out["static_samples"] = stat;

  json dyn = json::array();
  for (const auto& s : ds.dynamic_samples) {
    json series = json::array();
    for (const auto& unit_series : s.accel_series) series.push_back(vec3_list_json(unit_series));
    dyn.push_back({{"pose_id", s.pose_id},
                   {"excited_joint", s.excited_joint},
                   {"amplitude", s.amplitude},
                   {"q", vec_json(s.q)},
                   {"series", {{"t", s.t}, {"q_d", s.q_d}, {"qdot_d", s.qdot_d}, {"qddot_d", s.qddot_d}}},
                   {"accel_series", series},
                   {"selected_index", s.selected_index},
                   {"selected", vec3_list_json(s.selected)}});
  }
  out["dynamic_samples"] = dyn;
  return out;
}

RigidTransform transform_from_json(const json& j, const std::string& path) {
  RigidTransform t;
  const std::string rpath = child(path, "rotation");
  const json& rows = array(field(j, path, "rotation"), rpath);
  if (rows.size() != 3) throw SchemaError(rpath, "expected 3 rows");
  for (std::size_t r = 0; r < 3; ++r) t.rotation.row(static_cast<Eigen::Index>(r)) = vec3(rows[r], child(rpath, r)).transpose();
  t.translation = vec3(field(j, path, "translation"), child(path, "translation"));
  if (!t.is_valid()) throw SchemaError(rpath, "not a proper rotation matrix");
  return t;
}

DhRow dh_row_from_json(const json& j, const std::string& path) {
  DhRow row;
  row.d = number_field(j, path, "d");
  row.theta_offset = number_field(j, path, "theta_offset");
  row.a = number_field(j, path, "a");
  row.alpha = number_field(j, path, "alpha");
  const std::string lpath = child(path, "joint_limits");
  const json& lim = array(field(j, path, "joint_limits"), lpath);
  if (lim.size() != 2) throw SchemaError(lpath, "expected [min, max]");
  row.joint_limits = {number(lim[0], child(lpath, 0)), number(lim[1], child(lpath, 1))};
  if (row.joint_limits.first > row.joint_limits.second) throw SchemaError(lpath, "min exceeds max");
  row.velocity_limit = number_field(j, path, "velocity_limit");
  return row.normalized();
}

SuParams su_params_from_json(const json& j, const std::string& path) {
  SuParams phi;
  phi.d_v = number_field(j, path, "d_v");
  phi.theta_v = number_field(j, path, "theta_v");
  phi.d_su = number_field(j, path, "d_su");
  phi.theta_su = number_field(j, path, "theta_su");
  phi.a_su = number_field(j, path, "a_su");
  phi.alpha_su = number_field(j, path, "alpha_su");
  phi.host_joint = index_field(j, path, "host_joint");
  return phi.normalized();
}

KinematicChain chain_from_json(const json& j, const std::string& path) {
  KinematicChain chain;
  const std::string cpath = child(path, "chain");
  const json& rows = array(field(j, path, "chain"), cpath);
  for (std::size_t i = 0; i < rows.size(); ++i) chain.rows.push_back(dh_row_from_json(rows[i], child(cpath, i)));
  if (chain.rows.size() < 2) throw SchemaError(cpath, "chain needs at least two joints");
  if (j.contains("base_frame")) chain.base_frame = transform_from_json(j["base_frame"], child(path, "base_frame"));
  return chain;
}

Dataset dataset_from_json(const json& j) {
  Dataset ds;
  const json& header = field(j, "", "header");
  ds.chain = chain_from_json(header, "/header");
  const std::size_t n_joints = ds.chain.size();
  ds.gravity.g_base = vec3(field(header, "/header", "gravity"), "/header/gravity");
  ds.sample_rate = number_field(header, "/header", "sample_rate");
  if (!(ds.sample_rate > 0.0)) throw SchemaError("/header/sample_rate", "must be positive");

  const json& units = array(field(header, "/header", "skin_units"), "/header/skin_units");
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string upath = child("/header/skin_units", i);
    SkinUnitInfo u{.su_id = index_field(units[i], upath, "su_id"),
                   .host_joint = index_field(units[i], upath, "host_joint")};
    if (u.host_joint < 1 || u.host_joint > n_joints)
      throw SchemaError(child(upath, "host_joint"), "outside the chain");
    ds.units.push_back(u);
  }
  const std::size_t n_units = ds.units.size();

  if (j.contains("ground_truth") && !j["ground_truth"].is_null()) {
    const json& gt = array(j["ground_truth"], "/ground_truth");
    if (gt.size() != n_units) throw SchemaError("/ground_truth", "must list one entry per skin unit");
    std::vector<SuParams> truth;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      truth.push_back(su_params_from_json(gt[i], child("/ground_truth", i)));
      if (truth.back().host_joint != ds.units[i].host_joint)
        throw SchemaError(child(child("/ground_truth", i), "host_joint"), "disagrees with header");
    }
    ds.ground_truth = std::move(truth);
  }

  const json& stat = array(field(j, "", "static_samples"), "/static_samples");
  for (std::size_t i = 0; i < stat.size(); ++i) {
    const std::string spath = child("/static_samples", i);
    StaticSample s;
    s.pose_id = index_field(stat[i], spath, "pose_id");
    s.q = vecx(field(stat[i], spath, "q"), child(spath, "q"), n_joints);
    s.accel = vec3_list(field(stat[i], spath, "accel"), child(spath, "accel"), n_units);
    ds.static_samples.push_back(std::move(s));
  }

  const json& dyn = array(field(j, "", "dynamic_samples"), "/dynamic_samples");
  for (std::size_t i = 0; i < dyn.size(); ++i) {
    const std::string dpath = child("/dynamic_samples", i);
    const json& e = dyn[i];
    DynamicSample s;
    s.pose_id = index_field(e, dpath, "pose_id");
    s.excited_joint = index_field(e, dpath, "excited_joint");
    if (s.excited_joint < 1 || s.excited_joint > n_joints)
      throw SchemaError(child(dpath, "excited_joint"), "outside the chain");
    s.amplitude = e.contains("amplitude") ? number_field(e, dpath, "amplitude") : 0.0;
    s.q = vecx(field(e, dpath, "q"), child(dpath, "q"), n_joints);
    const std::string spath = child(dpath, "series");
    const json& series = field(e, dpath, "series");
    s.t = doubles(field(series, spath, "t"), child(spath, "t"));
    s.q_d = doubles(field(series, spath, "q_d"), child(spath, "q_d"));
    s.qdot_d = doubles(field(series, spath, "qdot_d"), child(spath, "qdot_d"));
    s.qddot_d = doubles(field(series, spath, "qddot_d"), child(spath, "qddot_d"));
    const std::size_t len = s.t.size();
    if (len == 0) throw SchemaError(child(spath, "t"), "empty time series");
    if (s.q_d.size() != len || s.qdot_d.size() != len || s.qddot_d.size() != len)
      throw SchemaError(spath, "series columns differ in length");
    const std::string apath = child(dpath, "accel_series");
    const json& acc = array(field(e, dpath, "accel_series"), apath);
    if (acc.size() != n_units) throw SchemaError(apath, "must hold one series per skin unit");
    for (std::size_t k = 0; k < n_units; ++k) s.accel_series.push_back(vec3_list(acc[k], child(apath, k), len));
    s.selected_index = index_field(e, dpath, "selected_index");
    if (s.selected_index >= len) throw SchemaError(child(dpath, "selected_index"), "past the end of the series");
    s.selected = vec3_list(field(e, dpath, "selected"), child(dpath, "selected"), n_units);
    ds.dynamic_samples.push_back(std::move(s));
  }
  return ds;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) { return dataset_from_json(read_json_file(path)); }

void save_dataset(const Dataset& ds, const std::filesystem::path& path) { write_json_file(to_json(ds), path); }

}  // namespace skincal
