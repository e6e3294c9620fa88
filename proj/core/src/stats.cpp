#include "wordrep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wordrep/rng.hpp"

namespace wordrep {

std::vector<double> average_ranks(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Centered, unit-norm vector; empty when the input is constant.
std::vector<double> normalize_ranks(const std::vector<double>& r) {
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  std::vector<double> out(r.size());
  double sq = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    out[i] = r[i] - mean;
    sq += out[i] * out[i];
  }
  if (sq <= 0.0) return {};
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : out) v *= inv;
  return out;
}

double dot_permuted(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<size_t>& perm) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[perm[i]];
  return s;
}

}  // namespace

SpearmanResult spearman(std::span<const double> x, std::span<const double> y, int n_permutations,
                        uint64_t seed) {
  SpearmanResult result;
  result.n = static_cast<int>(x.size());
  if (x.size() != y.size() || x.size() < 3) return result;
  const auto ax = normalize_ranks(average_ranks(x));
  const auto ay = normalize_ranks(average_ranks(y));
  if (ax.empty() || ay.empty()) return result;  // constant input

  const size_t n = x.size();
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), size_t{0});
  result.rho = dot_permuted(ax, ay, perm);
  const double threshold = std::abs(result.rho) - 1e-12;

  if (n <= 8) {
    long hits = 0, total = 0;
    do {
      ++total;
      if (std::abs(dot_permuted(ax, ay, perm)) >= threshold) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    result.method = "exact";
  } else {
    Rng rng = Rng(seed).child("spearman-permutation");
    long hits = 0;
    for (int b = 0; b < n_permutations; ++b) {
      rng.shuffle(perm);
      if (std::abs(dot_permuted(ax, ay, perm)) >= threshold) ++hits;
    }
    result.p_value = static_cast<double>(hits + 1) / static_cast<double>(n_permutations + 1);
    result.method = "permutation(" + std::to_string(n_permutations) + ")";
  }
  result.defined = true;
  return result;
}

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  OlsResult out;
  out.rank = static_cast<int>(qr.rank());
  out.beta = qr.solve(y);
  out.r2 = r_squared(X, out.beta, y);
  return out;
}

std::vector<int> collinear_columns(const Eigen::MatrixXd& X) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> out;
  if (rank >= X.cols()) return out;
  const auto perm = qr.colsPermutation().indices();
  for (int i = rank; i < X.cols(); ++i) out.push_back(perm(i));
  std::sort(out.begin(), out.end());
  return out;
}

double r_squared(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, const Eigen::VectorXd& y) {
  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  if (sst <= 0.0) return 0.0;
  const double ssr = (y - X * beta).squaredNorm();
  return 1.0 - ssr / sst;
}

MeanCi mean_ci(std::span<const double> values) {
  // Two-sided 97.5% Student t quantiles for df = 1..30; ~1.96 beyond.
  static const double t975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  MeanCi out;
  out.n = static_cast<int>(values.size());
  if (out.n == 0) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(sq / static_cast<double>(out.n - 1));
  const int df = out.n - 1;
  const double t = df <= 30 ? t975[df - 1] : 1.96;
  out.ci95 = t * sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

}  // namespace wordrep
