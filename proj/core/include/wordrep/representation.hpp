#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "wordrep/checkpoint.hpp"
#include "wordrep/phonology.hpp"

namespace wordrep {

enum class DistanceMetric { kEuclidean, kCosine };

// Row p = encoder hidden state (top layer) after processing the single-token
// sequence [p] in eval mode; one row per inventory phoneme, in inventory
// order.
Eigen::MatrixXd phoneme_embedding_matrix(const Checkpoint& ckpt, const Inventory& inventory);

struct RepresentationReport {
  Eigen::MatrixXd dsm;            // pairwise distances, symmetric, zero diagonal
  std::vector<int> leaf_order;    // dendrogram leaf ordering of the rows
  Eigen::MatrixXd projection;     // rows x 2, PCA scores
  DistanceMetric metric = DistanceMetric::kEuclidean;
};

// Pairwise distances, agglomerative clustering (average linkage) for the
// display order, and a 2-component PCA projection.
RepresentationReport representation_report(const Eigen::MatrixXd& embeddings,
                                           DistanceMetric metric = DistanceMetric::kEuclidean);

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& rows, DistanceMetric metric);

// Average-linkage agglomerative leaf order over a distance matrix.
std::vector<int> hierarchical_leaf_order(const Eigen::MatrixXd& dsm);

// Mean silhouette over all points for a labelling, computed from a
// precomputed distance matrix.
double silhouette_from_distances(const Eigen::MatrixXd& dsm, std::span<const int> labels);

// Between-class vs within-class mean distances for a 2-way split.
struct ClassSeparation {
  double mean_within = 0.0;
  double mean_between = 0.0;
  double silhouette = 0.0;
};
ClassSeparation class_separation(const Eigen::MatrixXd& dsm, std::span<const int> labels);

std::string matrix_to_tsv(const Eigen::MatrixXd& m, const std::vector<std::string>& row_labels);

}  // namespace wordrep
