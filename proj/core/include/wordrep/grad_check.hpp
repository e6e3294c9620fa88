#pragma once

#include <functional>
#include <string>

#include "wordrep/numerics.hpp"

namespace wordrep {

// A differentiable scalar objective exposed for verification. `eval(true)`
// must also fill `grads` (same layout as `params`) with the reverse-mode
// gradient; `eval(false)` only returns the loss. The objective must be
// deterministic: repeated calls at the same parameters return the same value.
struct GradCheckProblem {
  std::function<double(bool want_grads)> eval;
  std::vector<TensorView<double>> params;
  std::vector<TensorView<double>> grads;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  Eigen::Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central finite differences against the problem's reverse-mode gradient.
// When max_coords_per_tensor > 0, a seeded random subset of coordinates is
// checked per tensor instead of all of them. Throws on non-finite loss.
GradCheckResult grad_check(GradCheckProblem& problem, double eps = 1e-5,
                           Eigen::Index max_coords_per_tensor = 0, uint64_t seed = 1);

}  // namespace wordrep
