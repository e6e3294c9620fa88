#include "wordrep/grad_check.hpp"

#include <cmath>
#include <stdexcept>

#include "wordrep/rng.hpp"

namespace wordrep {

GradCheckResult grad_check(GradCheckProblem& problem, double eps, Eigen::Index max_coords_per_tensor,
                           uint64_t seed) {
  if (problem.params.size() != problem.grads.size())
    throw std::invalid_argument("grad_check: params/grads tensor lists disagree");

  const double base = problem.eval(true);
  if (!std::isfinite(base)) throw std::runtime_error("grad_check: non-finite loss");

  // Snapshot the analytic gradient before finite differencing perturbs state.
  std::vector<VecD> analytic;
  analytic.reserve(problem.grads.size());
  for (auto& g : problem.grads) analytic.push_back(g.map());

  GradCheckResult result;
  Rng rng(seed);
  for (size_t ti = 0; ti < problem.params.size(); ++ti) {
    auto& view = problem.params[ti];
    std::vector<Eigen::Index> coords;
    if (max_coords_per_tensor > 0 && view.size > max_coords_per_tensor) {
      for (Eigen::Index k = 0; k < max_coords_per_tensor; ++k)
        coords.push_back(static_cast<Eigen::Index>(rng.uniform_int(static_cast<uint64_t>(view.size))));
    } else {
      coords.resize(static_cast<size_t>(view.size));
      for (Eigen::Index k = 0; k < view.size; ++k) coords[static_cast<size_t>(k)] = k;
    }
    for (Eigen::Index c : coords) {
      const double saved = view.data[c];
      view.data[c] = saved + eps;
      const double up = problem.eval(false);
      view.data[c] = saved - eps;
      const double down = problem.eval(false);
      view.data[c] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw std::runtime_error("grad_check: non-finite loss while perturbing " + view.name);
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[ti](c);
      const double denom = std::max(std::abs(a) + std::abs(numeric), 1e-6);
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = view.name;
        result.worst_index = c;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace wordrep
