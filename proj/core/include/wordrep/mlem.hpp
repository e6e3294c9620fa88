#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wordrep/phonology.hpp"

namespace wordrep {

struct MlemOptions {
  std::vector<double> lambda_grid = {0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  int cv_folds = 5;
  int bootstrap = 1000;
  int permutations = 1000;
  bool include_rounded = false;  // optional 4th vowel axis
  uint64_t seed = 1;
};

struct MlemFeature {
  std::string name;
  double importance = 0.0;  // fitted non-negative weight
  double std_error = 0.0;   // bootstrap over pairs
  double p_value = 1.0;     // response permutation
};

struct MlemReport {
  PhonemeClass cls = PhonemeClass::kConsonant;
  std::vector<MlemFeature> features;
  double intercept = 0.0;
  double lambda = 0.0;
  double r2 = 0.0;
  int n_pairs = 0;
};

// Metric-learning encoding model: for every same-class phoneme pair, the
// predictors are the binary feature-difference indicators and the response
// is the neural distance. Fits a non-negative-weight ridge model with the
// penalty chosen by cross-validation over pairs; feature importance is the
// fitted weight.
MlemReport mlem_fit(const Eigen::MatrixXd& dsm, PhonemeClass cls, const Inventory& inventory,
                    const MlemOptions& options = {});

// Non-negative ridge with an unpenalized non-negative intercept, solved by
// cyclic coordinate descent. Returns (intercept, weights).
std::pair<double, Eigen::VectorXd> nonnegative_ridge(const Eigen::MatrixXd& X,
                                                     const Eigen::VectorXd& y, double lambda);

}  // namespace wordrep
