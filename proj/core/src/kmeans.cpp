#include "wordrep/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wordrep/representation.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

namespace {

double sq_dist(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::RowVectorXd& c) {
  return (points.row(i) - c).squaredNorm();
}

KmeansResult lloyd_once(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();

  // k-means++ seeding.
  Eigen::MatrixXd centroids(k, d);
  std::vector<double> dist2(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  const Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_int(static_cast<uint64_t>(n)));
  centroids.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      dist2[static_cast<size_t>(i)] =
          std::min(dist2[static_cast<size_t>(i)], sq_dist(points, i, centroids.row(c - 1)));
      total += dist2[static_cast<size_t>(i)];
    }
    Eigen::Index pick = 0;
    if (total > 0) {
      double u = rng.uniform01() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= dist2[static_cast<size_t>(i)];
        if (u <= 0) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_int(static_cast<uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
  }

  KmeansResult result;
  result.k = k;
  result.assignment.assign(static_cast<size_t>(n), 0);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, centroids.row(0));
      for (int c = 1; c < k; ++c) {
        const double dd = sq_dist(points, i, centroids.row(c));
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (result.assignment[static_cast<size_t>(i)] != best) {
        result.assignment[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<long> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(result.assignment[static_cast<size_t>(i)]) += points.row(i);
      ++counts[static_cast<size_t>(result.assignment[static_cast<size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
      } else {
        // Empty cluster: reseed to the point farthest from its centroid.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double dd = sq_dist(points, i, centroids.row(result.assignment[static_cast<size_t>(i)]));
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        centroids.row(c) = points.row(far);
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
  }

  result.centroids = centroids;
  result.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    result.inertia += sq_dist(points, i, centroids.row(result.assignment[static_cast<size_t>(i)]));
  return result;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (points.rows() < k)
    throw std::invalid_argument("kmeans: fewer points than clusters (k = " + std::to_string(k) + ")");
  Rng base = Rng(seed).child("kmeans");
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = base.child(static_cast<uint64_t>(r));
    KmeansResult candidate = lloyd_once(points, k, rng);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  const Eigen::MatrixXd dsm = pairwise_distances(points, DistanceMetric::kEuclidean);
  best.mean_silhouette = silhouette_from_distances(dsm, best.assignment);
  return best;
}

ClusterReport select_k_by_silhouette(const Eigen::MatrixXd& points, int k_min, int k_max,
                                     int restarts, uint64_t seed) {
  if (points.rows() < k_min + 1)
    throw std::invalid_argument("select_k_by_silhouette: too few points");
  ClusterReport report;

  double spread = 0.0;
  for (Eigen::Index i = 1; i < points.rows(); ++i)
    spread = std::max(spread, (points.row(i) - points.row(0)).norm());
  if (spread <= 0.0) {
    report.degenerate = true;
    report.best.k = 1;
    report.best.assignment.assign(static_cast<size_t>(points.rows()), 0);
    report.best.centroids = points.topRows(1);
    return report;
  }

  double best_sil = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= std::min<int>(k_max, static_cast<int>(points.rows()) - 1); ++k) {
    KmeansResult r = kmeans(points, k, restarts, seed);
    report.silhouette_per_k.emplace_back(k, r.mean_silhouette);
    if (r.mean_silhouette > best_sil) {
      best_sil = r.mean_silhouette;
      report.best = std::move(r);
    }
  }
  return report;
}

}  // namespace wordrep
