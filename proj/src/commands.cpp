#include "skincal/commands.hpp"

#include "skincal/avoidance.hpp"
#include "skincal/dataset_io.hpp"
#include "skincal/errors.hpp"
#include "skincal/metrics.hpp"
#include "skincal/result_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace skincal {

namespace {

Vec3 parse_vec3(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> values;
  while (std::getline(ss, part, ',')) values.push_back(std::stod(part));
  if (values.size() != 3) throw InvalidArgument("expected three comma-separated numbers, got '" + text + "'");
  return {values[0], values[1], values[2]};
}

std::vector<ProximityReading> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ProximityReading> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string t, id, d;
    if (!std::getline(ss, t, ',') || !std::getline(ss, id, ',') || !std::getline(ss, d, ','))
      throw SchemaError(path + ":" + std::to_string(line_no), "expected t,su_id,d_mm");
    try {
      out.push_back({.su_id = std::stoul(id), .distance_mm = std::stod(d), .timestamp = std::stod(t)});
    } catch (const std::logic_error&) {
      if (out.empty() && line_no == 1) continue;  // header row
      throw SchemaError(path + ":" + std::to_string(line_no), "malformed row");
    }
  }
  return out;
}

void report_units(const CalibrationResult& r, std::ostream& err) {
  for (const auto& u : r.units) {
    if (u.error) {
      err << "SU" << u.su_id << " (joint " << u.host_joint << "): " << u.error_kind.value_or("error") << ": "
          << *u.error << '\n';
    } else if (!u.converged) {
      err << "SU" << u.su_id << " (joint " << u.host_joint << "): not converged"
          << (u.flat_objective ? " (flat objective, no excitation signal)" : "") << ", E_s=" << u.static_error
          << ", E_d=" << u.dynamic_error << '\n';
    }
  }
}

}  // namespace

CalibConfig calib_config_from(const RunConfig& config) {
  CalibConfig c;
  c.restarts = config.restarts;
  c.static_error_threshold = config.static_threshold;
  c.param_delta_threshold = config.delta_threshold;
  c.max_iterations = config.max_iterations;
  c.rng_seed = config.seed;
  c.tangential = config.numeric_tangential ? TangentialMethod::kNumeric : TangentialMethod::kAnalytic;
  return c;
}

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.out.empty()) {
    err << "generate: --out is required\n";
    return kExitFailure;
  }
  KinematicChain chain;
  try {
    chain = config.chain.empty() ? example_7dof_chain() : chain_from_json(read_json_file(config.chain));
  } catch (const SchemaError& e) {
    err << "generate: invalid chain file: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "generate: " << e.what() << '\n';
    return kExitDataError;
  }

  GenerateOptions opts;
  opts.poses = config.poses;
  opts.units = config.units;
  opts.seed = config.seed;
  opts.noise.accel_sigma = config.noise;
  opts.profile.amplitude = config.amplitude;
  opts.profile.frequency = config.frequency;
  opts.profile.duration = 1.0 / config.frequency;
  Dataset ds;
  try {
    ds = generate_dataset(chain, opts);
  } catch (const std::exception& e) {
    err << "generate: " << e.what() << '\n';
    return kExitDataError;
  }
  try {
    save_dataset(ds, config.out);
  } catch (const std::exception& e) {
    err << "generate: " << e.what() << '\n';
    return kExitFailure;
  }
  out << "wrote " << config.out << ": " << ds.units.size() << " units, " << ds.static_samples.size()
      << " static poses, " << ds.dynamic_samples.size() << " excitation records\n";
  return kExitOk;
}

int cmd_calibrate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.dataset.empty() || config.out.empty()) {
    err << "calibrate: --dataset and --out are required\n";
    return kExitFailure;
  }
  Dataset ds;
  try {
    ds = load_dataset(config.dataset);
  } catch (const SchemaError& e) {
    err << "calibrate: schema violation at " << e.path() << ": " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "calibrate: " << e.what() << '\n';
    return kExitDataError;
  }

  ResultDocument doc{.chain = ds.chain, .trials = {}};
  CalibConfig cc = calib_config_from(config);
  try {
    for (std::size_t t = 0; t < std::max<std::size_t>(1, config.trials); ++t) {
      cc.rng_seed = config.seed + t;
      doc.trials.push_back(config.monolithic ? calibrate_monolithic(ds, cc) : calibrate(ds, cc));
    }
  } catch (const std::exception& e) {
    err << "calibrate: " << e.what() << '\n';
    return kExitDataError;
  }
  try {
    write_json_file(to_json(doc, config.timings), config.out);
  } catch (const std::exception& e) {
    err << "calibrate: " << e.what() << '\n';
    return kExitFailure;
  }

  bool data_error = false;
  bool converged = true;
  for (const auto& r : doc.trials) {
    report_units(r, err);
    data_error = data_error || r.any_data_error();
    converged = converged && r.all_converged();
  }
  out << "wrote " << config.out << " (" << doc.trials.size() << " trial" << (doc.trials.size() == 1 ? "" : "s")
      << (config.monolithic ? ", monolithic" : ", two-stage") << ")\n";
  if (config.timings) {
    for (const auto& r : doc.trials) out << "seed " << r.seed << ": " << r.wall_seconds << " s\n";
  }
  if (data_error) return kExitDataError;
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.dataset.empty() || config.result.empty()) {
    err << "evaluate: --dataset and --result are required\n";
    return kExitFailure;
  }
  try {
    const Dataset ds = load_dataset(config.dataset);
    if (!ds.ground_truth) {
      err << "evaluate: dataset " << config.dataset
          << " has no ground_truth section; accuracy cannot be evaluated\n";
      return kExitDataError;
    }
    const ResultDocument doc = result_document_from_json(read_json_file(config.result));
    std::vector<std::vector<SuErrorReport>> trials;
    for (const auto& r : doc.trials) trials.push_back(evaluate_result(r, ds));
    const AggregateReport report = aggregate_report(trials);
    out << report.to_text();
    if (!config.out.empty()) write_json_file(report.to_json(), config.out);
  } catch (const SchemaError& e) {
    err << "evaluate: schema violation at " << e.path() << ": " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "evaluate: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_demo_avoid(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.result.empty() || config.trace.empty()) {
    err << "demo-avoid: --result and --trace are required\n";
    return kExitFailure;
  }
  try {
    const ResultDocument doc = result_document_from_json(read_json_file(config.result));
    const Eigen::VectorXd q = reference_configuration(doc.chain);
    std::map<std::size_t, RigidTransform> poses;
    for (const auto& u : doc.trials.front().units)
      if (u.estimate) poses.emplace(u.su_id, su_world_pose(doc.chain, *u.estimate, q));
    const Vec3 velocity = parse_vec3(config.velocity);
    const auto trace = read_trace(config.trace);

    std::ofstream file;
    if (!config.out.empty()) {
      file.open(config.out, std::ios::trunc);
      if (!file) throw std::runtime_error("cannot write " + config.out);
    }
    std::ostream& sink = config.out.empty() ? out : file;
    sink << "t,su_id,d_mm,beta,vx,vy,vz\n" << std::setprecision(10);
    for (const auto& reading : trace) {
      const Vec3 v = adjust_trajectory(velocity, reading, poses);
      sink << reading.timestamp << ',' << reading.su_id << ',' << reading.distance_mm << ','
           << repulsive_magnitude(reading.distance_mm) << ',' << v.x() << ',' << v.y() << ',' << v.z() << '\n';
    }
  } catch (const SchemaError& e) {
    err << "demo-avoid: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "demo-avoid: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Accelerometer-based pose calibration of robot skin units"};
  app.require_subcommand(1);
  RunConfig config;

  auto* gen = app.add_subcommand("generate", "Simulate a ground-truth dataset");
  gen->add_option("--out", config.out, "Dataset JSON to write")->required();
  gen->add_option("--seed", config.seed, "Random seed");
  gen->add_option("--noise", config.noise, "Accelerometer noise sigma [m/s^2]")->check(CLI::NonNegativeNumber);
  gen->add_option("--poses", config.poses, "Number of static poses")->check(CLI::PositiveNumber);
  gen->add_option("--units", config.units, "Number of skin units");
  gen->add_option("--amplitude", config.amplitude, "Excitation velocity amplitude [rad/s]")->check(CLI::NonNegativeNumber);
  gen->add_option("--frequency", config.frequency, "Excitation frequency [Hz]")->check(CLI::PositiveNumber);
  gen->add_option("--chain", config.chain, "Chain description JSON (default: built-in 7-DoF arm)");

  auto* cal = app.add_subcommand("calibrate", "Estimate skin-unit poses from a dataset");
  cal->add_option("--dataset", config.dataset, "Dataset JSON")->required();
  cal->add_option("--out", config.out, "Result JSON to write")->required();
  cal->add_option("--seed", config.seed, "Optimizer seed (trial t uses seed + t)");
  cal->add_option("--restarts", config.restarts, "Random restarts per stage")->check(CLI::PositiveNumber);
  cal->add_option("--static-threshold", config.static_threshold, "Static error early-exit threshold");
  cal->add_option("--delta-threshold", config.delta_threshold, "Parameter change tolerance");
  cal->add_option("--max-iterations", config.max_iterations, "Iteration cap per local search");
  cal->add_option("--trials", config.trials, "Repeat the optimization with successive seeds")->check(CLI::PositiveNumber);
  cal->add_flag("--monolithic", config.monolithic, "Optimize all six parameters jointly");
  cal->add_flag("--timings", config.timings, "Include wall times in the result file");
  cal->add_flag("--numeric-tangential", config.numeric_tangential, "Use the finite-difference tangential term");

  auto* eval = app.add_subcommand("evaluate", "Compare a result against dataset ground truth");
  eval->add_option("--dataset", config.dataset, "Dataset JSON with ground truth")->required();
  eval->add_option("--result", config.result, "Result JSON")->required();
  eval->add_option("--out", config.out, "Report JSON to write");

  auto* demo = app.add_subcommand("demo-avoid", "Apply proximity repulsion to a nominal velocity");
  demo->add_option("--result", config.result, "Result JSON")->required();
  demo->add_option("--trace", config.trace, "CSV of t,su_id,d_mm")->required();
  demo->add_option("--out", config.out, "Adjusted trajectory CSV (default: stdout)");
  demo->add_option("--velocity", config.velocity, "Nominal Cartesian velocity x,y,z");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*gen) return cmd_generate(config, std::cout, std::cerr);
  if (*cal) return cmd_calibrate(config, std::cout, std::cerr);
  if (*eval) return cmd_evaluate(config, std::cout, std::cerr);
  return cmd_demo_avoid(config, std::cout, std::cerr);
}

}  // namespace skincal
