#include "skincal/simulator.hpp"

#include "skincal/errors.hpp"
#include "skincal/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace skincal {

namespace {

// Independent streams per generator and per task.
enum StreamTag : std::uint64_t { kPoseStream = 1, kPlacementStream = 2, kStaticNoise = 3, kDynamicNoise = 4 };

Vec3 add_noise(const Vec3& v, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return v;
  std::normal_distribution<double> dist(0.0, sigma);
  Vec3 out = v;
  for (int i = 0; i < 3; ++i) out[i] += dist(rng);
  return out;
}

void check_units(const KinematicChain& chain, const std::vector<SuParams>& units) {
  for (const auto& u : units)
    if (u.host_joint < 1 || u.host_joint > chain.size())
      throw InvalidArgument("skin unit hosted on joint " + std::to_string(u.host_joint) +
                            " outside the chain");
}

}  // namespace

void ExcitationProfile::validate() const {
  if (!(amplitude >= 0.0) || !(frequency > 0.0) || !(duration > 0.0) || !(sample_rate > 0.0) ||
      !(rest_time >= 0.0))
    throw InvalidArgument("excitation profile needs A >= 0 and positive f, duration, rate");
}

JointState DynamicSample::selected_state() const {
  JointState s = JointState::at_rest(q);
  const auto d = static_cast<Eigen::Index>(excited_joint - 1);
  s.q[d] = q_d.at(selected_index);
  s.qdot[d] = qdot_d.at(selected_index);
  s.qddot[d] = qddot_d.at(selected_index);
  return s;
}

std::size_t Dataset::unit_index(std::size_t su_id) const {
  for (std::size_t i = 0; i < units.size(); ++i)
    if (units[i].su_id == su_id) return i;
  throw LookupError("unknown skin unit id " + std::to_string(su_id));
}

std::vector<Eigen::VectorXd> sample_poses(const KinematicChain& chain, std::size_t count,
                                          std::uint64_t seed) {
  auto rng = make_stream(seed, kPoseStream);
  std::vector<Eigen::VectorXd> poses;
  poses.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    Eigen::VectorXd q(static_cast<Eigen::Index>(chain.size()));
    for (std::size_t j = 0; j < chain.size(); ++j) {
      const auto [lo, hi] = chain.rows[j].joint_limits;
      q[static_cast<Eigen::Index>(j)] = lo == hi ? lo : std::clamp(uniform(rng, lo, hi), lo, hi);
    }
    poses.push_back(std::move(q));
  }
  return poses;
}

std::vector<SuParams> place_sus(const KinematicChain& chain, std::size_t count,
                                std::uint64_t seed, const PlacementBounds& bounds) {
  if (chain.size() < 1 || count > chain.size() - 1)
    throw InvalidArgument("cannot place " + std::to_string(count) + " units on a chain with " +
                          std::to_string(chain.size()) + " joints (first link is excluded)");
  auto rng = make_stream(seed, kPlacementStream);
  constexpr double pi = std::numbers::pi;
  std::vector<SuParams> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    SuParams phi;
    phi.theta_v = uniform(rng, -pi, pi);
    phi.d_v = uniform(rng, -bounds.max_abs_d, bounds.max_abs_d);
    phi.theta_su = uniform(rng, -pi, pi);
    phi.d_su = uniform(rng, -bounds.max_abs_d, bounds.max_abs_d);
    phi.a_su = uniform(rng, 0.0, bounds.max_a);
    phi.alpha_su = uniform(rng, -pi, pi);
    phi.host_joint = k + 2;
    out.push_back(phi.normalized());
  }
  return out;
}

std::vector<StaticSample> simulate_static(const KinematicChain& chain,
                                          const std::vector<SuParams>& units,
                                          const std::vector<Eigen::VectorXd>& poses,
                                          const NoiseModel& noise, const GravityModel& gravity) {
  check_units(chain, units);
  if (noise.accel_sigma < 0.0) throw InvalidArgument("noise sigma must be nonnegative");
  std::vector<StaticSample> out;
  out.reserve(poses.size());
  for (std::size_t p = 0; p < poses.size(); ++p) {
    auto rng = make_stream(noise.seed, kStaticNoise, p);
    StaticSample sample{.pose_id = p, .q = poses[p], .accel = {}};
    for (const auto& phi : units)
      sample.accel.push_back(add_noise(static_accel(chain, phi, poses[p], gravity), noise.accel_sigma, rng));
    out.push_back(std::move(sample));
  }
  return out;
}

double fit_amplitude(const DhRow& row, double q0, const ExcitationProfile& profile) {
  const auto [lo, hi] = row.joint_limits;
  const double omega = 2.0 * std::numbers::pi * profile.frequency;
  // q(t) - q0 = A (1 - cos(omega t)) / omega sweeps [0, 2A/omega].
  double amplitude = std::min(profile.amplitude, row.velocity_limit);
  const double excursion = 2.0 * amplitude / omega;
  if (q0 + excursion <= hi) return amplitude;
  if (q0 - excursion >= lo) return -amplitude;
  // Shrink slightly so rounding cannot push the endpoint past the limit.
  constexpr double kMargin = 1.0 - 1e-9;
  const double room_up = std::max(0.0, hi - q0);
  const double room_down = std::max(0.0, q0 - lo);
  return room_up >= room_down ? kMargin * room_up * omega / 2.0 : -kMargin * room_down * omega / 2.0;
}

std::vector<DynamicSample> simulate_dynamic(const KinematicChain& chain,
                                            const std::vector<SuParams>& units,
                                            const std::vector<Eigen::VectorXd>& poses,
                                            const std::vector<ExcitationProfile>& profiles,
                                            const NoiseModel& noise, const GravityModel& gravity) {
  check_units(chain, units);
  if (profiles.size() != 1 && profiles.size() != chain.size())
    throw InvalidArgument("need one excitation profile per joint or a single shared profile");
  for (const auto& pr : profiles) pr.validate();
  if (noise.accel_sigma < 0.0) throw InvalidArgument("noise sigma must be nonnegative");

  std::vector<DynamicSample> out;
  out.reserve(poses.size() * chain.size());
  for (std::size_t p = 0; p < poses.size(); ++p) {
    check_limits(chain, poses[p]);
    for (std::size_t j = 0; j < chain.size(); ++j) {
      const ExcitationProfile& profile = profiles.size() == 1 ? profiles.front() : profiles[j];
      const DhRow& row = chain.rows[j];
      const auto jd = static_cast<Eigen::Index>(j);
      const double q0 = poses[p][jd];
      const double omega = 2.0 * std::numbers::pi * profile.frequency;
      const double amp = fit_amplitude(row, q0, profile);

      DynamicSample s;
      s.pose_id = p;
      s.excited_joint = j + 1;
      s.amplitude = amp;
      s.q = poses[p];
      const auto n_samples =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(profile.duration * profile.sample_rate)));
      s.accel_series.assign(units.size(), {});
      auto rng = make_stream(noise.seed, kDynamicNoise, p, j);

      double peak = -1.0;
      for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / profile.sample_rate;
        const double q = q0 + amp * (1.0 - std::cos(omega * t)) / omega;
        const double qdot = amp * std::sin(omega * t);
        const double qddot = amp * omega * std::cos(omega * t);
        if (q < row.joint_limits.first || q > row.joint_limits.second)
          throw InvalidArgument("excitation of joint " + std::to_string(j + 1) + " at pose " +
                                std::to_string(p) + " leaves the joint limits");
        s.t.push_back(t);
        s.q_d.push_back(q);
        s.qdot_d.push_back(qdot);
        s.qddot_d.push_back(qddot);
        if (std::abs(qddot) > peak) {
          peak = std::abs(qddot);
          s.selected_index = i;
        }

        JointState state = JointState::at_rest(poses[p]);
        state.q[jd] = q;
        state.qdot[jd] = qdot;
        state.qddot[jd] = qddot;
        for (std::size_t k = 0; k < units.size(); ++k) {
          // A joint distal to the host leaves the unit at rest.
          const Vec3 clean = s.excited_joint <= units[k].host_joint
                                 ? total_accel(chain, units[k], state, s.excited_joint, gravity)
                                 : static_accel(chain, units[k], state.q, gravity);
          s.accel_series[k].push_back(add_noise(clean, noise.accel_sigma, rng));
        }
      }
      for (std::size_t k = 0; k < units.size(); ++k)
        s.selected.push_back(s.accel_series[k][s.selected_index]);
      out.push_back(std::move(s));
    }
  }
  return out;
}

Dataset generate_dataset(const KinematicChain& chain, const GenerateOptions& options) {
  chain.validate();
  Dataset ds;
  ds.gravity = options.gravity;
  ds.sample_rate = options.profile.sample_rate;
  ds.chain = chain;
  const auto truth = place_sus(chain, options.units, options.seed, options.placement);
  for (const auto& phi : truth) ds.units.push_back({.su_id = phi.host_joint - 1, .host_joint = phi.host_joint});
  ds.ground_truth = truth;
  const auto poses = sample_poses(chain, options.poses, options.seed);
  NoiseModel noise = options.noise;
  noise.seed = options.seed;
  ds.static_samples = simulate_static(chain, truth, poses, noise, options.gravity);
  ds.dynamic_samples = simulate_dynamic(chain, truth, poses, {options.profile}, noise, options.gravity);
  return ds;
}

}  // namespace skincal
