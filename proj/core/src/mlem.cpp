#include "wordrep/mlem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wordrep/rng.hpp"
#include "wordrep/stats.hpp"

namespace wordrep {

std::pair<double, Eigen::VectorXd> nonnegative_ridge(const Eigen::MatrixXd& X,
                                                     const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index p = X.cols();
  const Eigen::Index n = X.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  double w0 = 0.0;
  Eigen::VectorXd col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = X.col(j).squaredNorm();

  Eigen::VectorXd residual = y;  // y - w0 - X w
  for (int iter = 0; iter < 10000; ++iter) {
    double max_delta = 0.0;

    // Intercept, unpenalized, clamped at zero (distances are non-negative).
    const double w0_new = std::max(0.0, w0 + residual.sum() / static_cast<double>(n));
    const double d0 = w0_new - w0;
    if (d0 != 0.0) {
      residual.array() -= d0;
      w0 = w0_new;
      max_delta = std::abs(d0);
    }

    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) + lambda <= 0.0) continue;
      const double rho = X.col(j).dot(residual) + col_sq(j) * w(j);
      const double wj_new = std::max(0.0, rho / (col_sq(j) + lambda));
      const double dj = wj_new - w(j);
      if (dj != 0.0) {
        residual -= dj * X.col(j);
        w(j) = wj_new;
        max_delta = std::max(max_delta, std::abs(dj));
      }
    }
    if (max_delta < 1e-12) break;
  }
  return {w0, w};
}

namespace {

double cv_mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, int folds,
              const std::vector<Eigen::Index>& order) {
  const Eigen::Index n = X.rows();
  double err = 0.0;
  long count = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<int>(i) % folds == f) test.push_back(order[static_cast<size_t>(i)]);
      else train.push_back(order[static_cast<size_t>(i)]);
    }
    if (train.empty() || test.empty()) continue;
    Eigen::MatrixXd Xt(static_cast<Eigen::Index>(train.size()), X.cols());
    Eigen::VectorXd yt(static_cast<Eigen::Index>(train.size()));
    for (size_t i = 0; i < train.size(); ++i) {
      Xt.row(static_cast<Eigen::Index>(i)) = X.row(train[i]);
      yt(static_cast<Eigen::Index>(i)) = y(train[i]);
    }
    const auto [w0, w] = nonnegative_ridge(Xt, yt, lambda);
    for (Eigen::Index idx : test) {
      const double pred = w0 + X.row(idx).dot(w);
      err += (pred - y(idx)) * (pred - y(idx));
      ++count;
    }
  }
  return count > 0 ? err / static_cast<double>(count) : std::numeric_limits<double>::infinity();
}

}  // namespace

MlemReport mlem_fit(const Eigen::MatrixXd& dsm, PhonemeClass cls, const Inventory& inventory,
                    const MlemOptions& options) {
  std::vector<int> members;
  for (int i = 0; i < inventory.size(); ++i)
    if (inventory.at(i).cls == cls) members.push_back(i);
  if (members.size() < 3)
    throw std::invalid_argument("mlem_fit: need at least 3 phonemes in the class");
  if (dsm.rows() != inventory.size() || dsm.cols() != inventory.size())
    throw std::invalid_argument("mlem_fit: dissimilarity matrix does not match the inventory");

  std::vector<std::string> names;
  {
    const auto probe = feature_difference(inventory.at(members[0]), inventory.at(members[1]));
    for (const auto& n : probe.names) names.emplace_back(n);
  }
  const bool with_rounded = options.include_rounded && cls == PhonemeClass::kVowel;
  if (with_rounded) names.emplace_back("rounded");

  const size_t n_pairs = members.size() * (members.size() - 1) / 2;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n_pairs), static_cast<Eigen::Index>(names.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n_pairs));
  Eigen::Index row = 0;
  for (size_t a = 0; a < members.size(); ++a) {
    for (size_t b = a + 1; b < members.size(); ++b) {
      const auto& pa = inventory.at(members[a]);
      const auto& pb = inventory.at(members[b]);
      const auto diff = feature_difference(pa, pb);
      for (int k = 0; k < 3; ++k) X(row, k) = diff.diff[static_cast<size_t>(k)];
      if (with_rounded) X(row, 3) = rounded_difference(pa, pb);
      y(row) = dsm(members[a], members[b]);
      ++row;
    }
  }

  MlemReport report;
  report.cls = cls;
  report.n_pairs = static_cast<int>(n_pairs);

  // Penalty selection by CV over pairs; ties go to the smaller penalty.
  Rng rng = Rng(options.seed).child("mlem");
  std::vector<Eigen::Index> order(n_pairs);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng cv_rng = rng.child("cv-order");
  cv_rng.shuffle(order);
  double best_lambda = options.lambda_grid.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double lambda : options.lambda_grid) {
    const double mse = cv_mse(X, y, lambda, options.cv_folds, order);
    if (mse < best_mse - 1e-15) {
      best_mse = mse;
      best_lambda = lambda;
    }
  }
  report.lambda = best_lambda;

  const auto [w0, w] = nonnegative_ridge(X, y, best_lambda);
  report.intercept = w0;
  const Eigen::VectorXd fitted = Eigen::VectorXd::Constant(y.size(), w0) + X * w;
  const double sst = (y.array() - y.mean()).square().sum();
  report.r2 = sst > 0 ? 1.0 - (y - fitted).squaredNorm() / sst : 0.0;

  // Bootstrap standard errors over pairs.
  Eigen::MatrixXd boot_w(options.bootstrap, w.size());
  Rng boot_rng = rng.child("bootstrap");
  Eigen::MatrixXd Xb(X.rows(), X.cols());
  Eigen::VectorXd yb(y.size());
  for (int b = 0; b < options.bootstrap; ++b) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const auto pick = static_cast<Eigen::Index>(boot_rng.uniform_int(static_cast<uint64_t>(X.rows())));
      Xb.row(i) = X.row(pick);
      yb(i) = y(pick);
    }
    boot_w.row(b) = nonnegative_ridge(Xb, yb, best_lambda).second.transpose();
  }

  // Permutation significance: shuffle the response, refit, count weights at
  // least as large.
  std::vector<long> hits(static_cast<size_t>(w.size()), 0);
  Rng perm_rng = rng.child("permutation");
  std::vector<Eigen::Index> idx(n_pairs);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Eigen::VectorXd y_perm(y.size());
  for (int b = 0; b < options.permutations; ++b) {
    perm_rng.shuffle(idx);
    for (Eigen::Index i = 0; i < y.size(); ++i) y_perm(i) = y(idx[static_cast<size_t>(i)]);
    const Eigen::VectorXd w_perm = nonnegative_ridge(X, y_perm, best_lambda).second;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (w_perm(j) >= w(j) - 1e-12) ++hits[static_cast<size_t>(j)];
  }

  for (Eigen::Index j = 0; j < w.size(); ++j) {
    MlemFeature f;
    f.name = names[static_cast<size_t>(j)];
    f.importance = w(j);
    const Eigen::VectorXd col = boot_w.col(j);
    const double mean = col.mean();
    f.std_error = options.bootstrap > 1
                      ? std::sqrt((col.array() - mean).square().sum() /
                                  static_cast<double>(options.bootstrap - 1))
                      : 0.0;
    f.p_value = static_cast<double>(hits[static_cast<size_t>(j)] + 1) /
                static_cast<double>(options.permutations + 1);
    report.features.push_back(std::move(f));
  }
  return report;
}

}  // namespace wordrep
