#include "skincal/nelder_mead.hpp"

#include "skincal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace skincal {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& initial_step,
                             const NelderMeadOptions& options) {
  const Eigen::Index n = x0.size();
  if (n == 0 || initial_step.size() != n) throw InvalidArgument("simplex dimension mismatch");
  if (!(options.xtol > 0.0) || !(options.ftol >= 0.0)) throw InvalidArgument("invalid simplex tolerances");

  NelderMeadResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> values(simplex.size());
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)][i] += initial_step[i];
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s;
    std::vector<double> v;
    for (auto i : order) {
      s.push_back(simplex[i]);
      v.push_back(values[i]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  const std::size_t worst = static_cast<std::size_t>(n);
  while (true) {
    sort_simplex();
    if (values.front() < options.ftarget) {
      result.reason = StopReason::kTargetReached;
      break;
    }
    double spread = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      spread = std::max(spread, (simplex[i] - simplex.front()).cwiseAbs().maxCoeff());
    const double value_spread = values.back() - values.front();
    if (spread < options.xtol && value_spread <= options.ftol) {
      result.reason = StopReason::kParameterTolerance;
      break;
    }
    if (result.iterations >= options.max_iterations) {
      result.reason = StopReason::kMaxIterations;
      break;
    }
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + kReflect * (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);

    if (f_reflected < values.front()) {
      const Eigen::VectorXd expanded = centroid + kExpand * (reflected - centroid);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[worst - 1]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    // Outside contraction when the reflection improved on the worst vertex,
    // inside contraction otherwise.
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + kContract * (reflected - centroid))
                : Eigen::VectorXd(centroid + kContract * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i] = simplex.front() + kShrink * (simplex[i] - simplex.front());
      values[i] = eval(simplex[i]);
    }
  }

  result.x = simplex.front();
  result.value = values.front();
  return result;
}

}  // namespace skincal
