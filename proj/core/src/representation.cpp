#include "wordrep/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wordrep/ioutil.hpp"

namespace wordrep {

Eigen::MatrixXd phoneme_embedding_matrix(const Checkpoint& ckpt, const Inventory& inventory) {
  if (inventory.checksum() != ckpt.inventory_checksum)
    throw std::runtime_error("phoneme_embedding_matrix: inventory checksum mismatch");
  const int n = inventory.size();
  Eigen::MatrixXd out(n, ckpt.config.hidden_size);
  for (int p = 0; p < n; ++p) {
    const std::vector<int> tokens = {p};
    const auto state = encode(ckpt.params, ckpt.config, tokens);
    out.row(p) = state.h.back().cast<double>().transpose();
  }
  return out;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& rows, DistanceMetric metric) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double dist;
      if (metric == DistanceMetric::kEuclidean) {
        dist = (rows.row(i) - rows.row(j)).norm();
      } else {
        const double denom = rows.row(i).norm() * rows.row(j).norm();
        dist = denom > 0 ? 1.0 - rows.row(i).dot(rows.row(j)) / denom : 0.0;
      }
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

std::vector<int> hierarchical_leaf_order(const Eigen::MatrixXd& dsm) {
  const int n = static_cast<int>(dsm.rows());
  if (n == 0) return {};
  if (n == 1) return {0};

  // Lance-Williams average linkage over an active-cluster distance matrix.
  struct Node {
    int left = -1, right = -1;  // children (node ids); leaves have none
    int size = 1;
  };
  std::vector<Node> nodes(static_cast<size_t>(n));
  std::vector<int> active;  // node ids with a live row in `dist`
  Eigen::MatrixXd dist = dsm;
  std::vector<int> row_of(static_cast<size_t>(n));  // node id -> row in dist
  for (int i = 0; i < n; ++i) {
    active.push_back(i);
    row_of[static_cast<size_t>(i)] = i;
  }

  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 1;
    for (size_t a = 0; a < active.size(); ++a) {
      for (size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist(row_of[static_cast<size_t>(active[a])],
                              row_of[static_cast<size_t>(active[b])]);
        if (d < best) {
          best = d;
          bi = a;
          bj = b;
        }
      }
    }
    const int ni = active[bi], nj = active[bj];
    Node merged;
    merged.left = ni;
    merged.right = nj;
    merged.size = nodes[static_cast<size_t>(ni)].size + nodes[static_cast<size_t>(nj)].size;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(merged);

    // Average-linkage update into ni's row, which the merged node reuses.
    const int ri = row_of[static_cast<size_t>(ni)];
    const int rj = row_of[static_cast<size_t>(nj)];
    const double wi = nodes[static_cast<size_t>(ni)].size;
    const double wj = nodes[static_cast<size_t>(nj)].size;
    for (int other : active) {
      if (other == ni || other == nj) continue;
      const int ro = row_of[static_cast<size_t>(other)];
      const double d = (wi * dist(ri, ro) + wj * dist(rj, ro)) / (wi + wj);
      dist(ri, ro) = d;
      dist(ro, ri) = d;
    }
    active.erase(active.begin() + static_cast<long>(bj));
    active[bi] = id;
    row_of.push_back(ri);
  }

  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  // Depth-first expansion, left child first.
  std::vector<int> stack = {active[0]};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& node = nodes[static_cast<size_t>(id)];
    if (node.left < 0) {
      order.push_back(id);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return order;
}

RepresentationReport representation_report(const Eigen::MatrixXd& embeddings, DistanceMetric metric) {
  RepresentationReport report;
  report.metric = metric;
  report.dsm = pairwise_distances(embeddings, metric);
  report.leaf_order = hierarchical_leaf_order(report.dsm);

  // PCA scores of the row-centered matrix, deterministic sign convention.
  const Eigen::MatrixXd centered = embeddings.rowwise() - embeddings.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int k = std::min<int>(2, static_cast<int>(svd.singularValues().size()));
  report.projection = Eigen::MatrixXd::Zero(embeddings.rows(), 2);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd loading = svd.matrixV().col(c);
    Eigen::Index imax;
    loading.cwiseAbs().maxCoeff(&imax);
    const double sign = loading(imax) < 0 ? -1.0 : 1.0;
    report.projection.col(c) = sign * svd.matrixU().col(c) * svd.singularValues()(c);
  }
  return report;
}

double silhouette_from_distances(const Eigen::MatrixXd& dsm, std::span<const int> labels) {
  const Eigen::Index n = dsm.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("silhouette_from_distances: label count mismatch");
  std::vector<int> distinct(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) return 0.0;

  double total = 0.0;
  long counted = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = 0.0;
    long na = 0;
    double b = std::numeric_limits<double>::infinity();
    for (int cls : distinct) {
      if (cls == labels[static_cast<size_t>(i)]) continue;
      double sum = 0.0;
      long cnt = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (labels[static_cast<size_t>(j)] != cls) continue;
        sum += dsm(i, j);
        ++cnt;
      }
      if (cnt > 0) b = std::min(b, sum / static_cast<double>(cnt));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || labels[static_cast<size_t>(j)] != labels[static_cast<size_t>(i)]) continue;
      a += dsm(i, j);
      ++na;
    }
    if (na == 0 || !std::isfinite(b)) continue;  // singleton cluster
    a /= static_cast<double>(na);
    const double denom = std::max(a, b);
    if (denom > 0) {
      total += (b - a) / denom;
      ++counted;
    }
  }
  return counted > 0 ? total / static_cast<double>(counted) : 0.0;
}

ClassSeparation class_separation(const Eigen::MatrixXd& dsm, std::span<const int> labels) {
  ClassSeparation sep;
  double within = 0.0, between = 0.0;
  long nw = 0, nb = 0;
  const Eigen::Index n = dsm.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (labels[static_cast<size_t>(i)] == labels[static_cast<size_t>(j)]) {
        within += dsm(i, j);
        ++nw;
      } else {
        between += dsm(i, j);
        ++nb;
      }
    }
  }
  sep.mean_within = nw > 0 ? within / static_cast<double>(nw) : 0.0;
  sep.mean_between = nb > 0 ? between / static_cast<double>(nb) : 0.0;
  sep.silhouette = silhouette_from_distances(dsm, labels);
  return sep;
}

std::string matrix_to_tsv(const Eigen::MatrixXd& m, const std::vector<std::string>& row_labels) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!row_labels.empty()) out << row_labels.at(static_cast<size_t>(i)) << '\t';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace wordrep
