#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace wordrep {

struct KmeansResult {
  int k = 0;
  std::vector<int> assignment;
  Eigen::MatrixXd centroids;  // k x dims
  double inertia = 0.0;
  double mean_silhouette = 0.0;
};

// Lloyd's algorithm with k-means++ seeding; `restarts` independent runs keep
// the lowest inertia. Deterministic given the seed.
KmeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, uint64_t seed);

struct ClusterReport {
  KmeansResult best;
  std::vector<std::pair<int, double>> silhouette_per_k;
  bool degenerate = false;  // all points identical
};

// k-means over k in [k_min, k_max], selecting the k with the highest mean
// silhouette.
ClusterReport select_k_by_silhouette(const Eigen::MatrixXd& points, int k_min = 2, int k_max = 8,
                                     int restarts = 50, uint64_t seed = 1);

}  // namespace wordrep
