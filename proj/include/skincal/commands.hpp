#pragma once

// Subcommands of the `skincal` tool.

#include "skincal/calibration.hpp"
#include "skincal/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace skincal {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitDataError = 2, kExitNotConverged = 3 };

struct RunConfig {
  std::string subcommand;
  std::string dataset;
  std::string out;
  std::string result;
  std::string trace;
  std::string chain;  // optional chain description for `generate`
  std::uint64_t seed = 0;
  double noise = 0.05;
  std::size_t poses = 16;
  std::size_t units = 6;
  double amplitude = 2.0;
  double frequency = 0.5;
  std::size_t restarts = 10;
  double static_threshold = 0.01;
  double delta_threshold = 0.001;
  std::size_t max_iterations = 2000;
  bool monolithic = false;
  std::size_t trials = 1;
  bool timings = false;
  bool numeric_tangential = false;
  std::string velocity = "0,0,0";  // nominal Cartesian velocity for demo-avoid
};

CalibConfig calib_config_from(const RunConfig& config);

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_calibrate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_demo_avoid(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int run_cli(int argc, char** argv);

}  // namespace skincal
