#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>

namespace skincal {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadOptions {
  /// Stop once the simplex spread (max over vertices of the L∞ distance to
  /// the best vertex) drops below this.
  double xtol = 1e-3;
  /// ...and the spread of objective values across the simplex drops below
  /// this. Both conditions must hold.
  double ftol = 1e-10;
  /// Stop once the best value drops below this. Disabled by default.
  double ftarget = -std::numeric_limits<double>::infinity();
  std::size_t max_iterations = 2000;
};

enum class StopReason { kParameterTolerance, kTargetReached, kMaxIterations };

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  StopReason reason = StopReason::kMaxIterations;

  bool converged() const { return reason != StopReason::kMaxIterations; }
};

/// Unconstrained downhill simplex (reflection 1, expansion 2, contraction
/// 1/2, shrink 1/2) started from `x0` with per-coordinate initial steps.
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& initial_step,
                             const NelderMeadOptions& options = {});

}  // namespace skincal
