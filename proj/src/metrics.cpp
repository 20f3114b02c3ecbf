#include "skincal/metrics.hpp"

#include "skincal/calibration.hpp"
#include "skincal/errors.hpp"
#include "skincal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace skincal {

namespace {

void require_same_host(const SuParams& est, const SuParams& truth) {
  if (est.host_joint != truth.host_joint)
    throw InvalidArgument("estimate hosted on joint " + std::to_string(est.host_joint) +
                          ", truth on joint " + std::to_string(truth.host_joint));
}

Eigen::VectorXd reference_or_default(const KinematicChain& chain,
                                     const std::optional<Eigen::VectorXd>& reference_q) {
  return reference_q ? *reference_q : reference_configuration(chain);
}

std::string format_stat(const SummaryStat& s, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << s.mean << " +/- " << s.stddev;
  return os.str();
}

nlohmann::json stat_json(const SummaryStat& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"count", s.count}};
}

}  // namespace

double position_error(const SuParams& est, const SuParams& truth, const KinematicChain& chain,
                      const std::optional<Eigen::VectorXd>& reference_q) {
  require_same_host(est, truth);
  const Eigen::VectorXd q = reference_or_default(chain, reference_q);
  const Vec3 pe = su_world_pose(chain, est, q).translation;
  const Vec3 pt = su_world_pose(chain, truth, q).translation;
  return 100.0 * (pe - pt).norm();
}

double quaternion_distance(const Mat3& a, const Mat3& b) {
  const Eigen::Quaterniond qa(a);
  const Eigen::Quaterniond qb(b);
  const double minus = (qa.coeffs() - qb.coeffs()).norm();
  const double plus = (qa.coeffs() + qb.coeffs()).norm();
  return std::min(minus, plus);
}

double quaternion_distance(const SuParams& est, const SuParams& truth, const KinematicChain& chain,
                           const std::optional<Eigen::VectorXd>& reference_q) {
  require_same_host(est, truth);
  const Eigen::VectorXd q = reference_or_default(chain, reference_q);
  return quaternion_distance(su_world_pose(chain, est, q).rotation,
                             su_world_pose(chain, truth, q).rotation);
}

SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

AggregateReport aggregate_report(const std::vector<std::vector<SuErrorReport>>& trials) {
  if (trials.empty()) throw InvalidArgument("no trials to aggregate");
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> per_unit;
  std::vector<double> all_pos;
  std::vector<double> all_quat;
  for (const auto& trial : trials) {
    for (const auto& r : trial) {
      per_unit[r.su_id].first.push_back(r.position_error_cm);
      per_unit[r.su_id].second.push_back(r.quaternion_distance);
      all_pos.push_back(r.position_error_cm);
      all_quat.push_back(r.quaternion_distance);
    }
  }
  AggregateReport report;
  report.trials = trials.size();
  for (const auto& [id, vals] : per_unit)
    report.rows.push_back({.su_id = id, .position_cm = summarize(vals.first), .quaternion = summarize(vals.second)});
  report.overall_position_cm = summarize(all_pos);
  report.overall_quaternion = summarize(all_quat);
  return report;
}

std::string AggregateReport::to_text() const {
  std::ostringstream os;
  constexpr int kLabel = 22;
  constexpr int kCol = 22;
  os << std::left << std::setw(kLabel) << ("trials: " + std::to_string(trials));
  for (const auto& r : rows) os << std::setw(kCol) << ("SU" + std::to_string(r.su_id));
  os << std::setw(kCol) << "Average" << '\n';
  os << std::setw(kLabel) << "Position error [cm]";
  for (const auto& r : rows) os << std::setw(kCol) << format_stat(r.position_cm, 4);
  os << std::setw(kCol) << format_stat(overall_position_cm, 4) << '\n';
  os << std::setw(kLabel) << "Quaternion distance";
  for (const auto& r : rows) os << std::setw(kCol) << format_stat(r.quaternion, 5);
  os << std::setw(kCol) << format_stat(overall_quaternion, 5) << '\n';
  return os.str();
}

nlohmann::json AggregateReport::to_json() const {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& r : rows)
    units.push_back({{"su_id", r.su_id},
                     {"position_error_cm", stat_json(r.position_cm)},
                     {"quaternion_distance", stat_json(r.quaternion)}});
  return {{"trials", trials},
          {"units", units},
          {"overall", {{"position_error_cm", stat_json(overall_position_cm)},
                       {"quaternion_distance", stat_json(overall_quaternion)}}}};
}

std::vector<SuErrorReport> evaluate_result(const CalibrationResult& result, const Dataset& dataset) {
  if (!dataset.ground_truth) throw InvalidArgument("dataset carries no ground truth; nothing to evaluate against");
  std::vector<SuErrorReport> out;
  for (const auto& u : result.units) {
    if (!u.estimate) continue;
    const SuParams& truth = (*dataset.ground_truth)[dataset.unit_index(u.su_id)];
    out.push_back({.su_id = u.su_id,
                   .position_error_cm = position_error(*u.estimate, truth, dataset.chain),
                   .quaternion_distance = quaternion_distance(*u.estimate, truth, dataset.chain)});
  }
  return out;
}

}  // namespace skincal
