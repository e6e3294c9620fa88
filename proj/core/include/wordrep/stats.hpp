#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace wordrep {

std::vector<double> average_ranks(std::span<const double> v);

struct SpearmanResult {
  bool defined = false;  // false when either input is constant or too short
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  std::string method;  // "exact" or "permutation(<B>)"
};

// Rank correlation with average ranks for ties. The two-sided p-value comes
// from a seeded permutation test; all n! permutations are enumerated when
// n <= 8.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y,
                        int n_permutations = 10000, uint64_t seed = 1);

struct OlsResult {
  Eigen::VectorXd beta;
  double r2 = 0.0;
  int rank = 0;
};

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Column indices that are linearly dependent on the others (empty when X has
// full column rank).
std::vector<int> collinear_columns(const Eigen::MatrixXd& X);

double r_squared(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, const Eigen::VectorXd& y);

// Mean and a 95% confidence interval half-width (Student t) across samples.
struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
  int n = 0;
};
MeanCi mean_ci(std::span<const double> values);

}  // namespace wordrep
