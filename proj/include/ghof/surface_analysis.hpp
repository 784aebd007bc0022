#pragma once

#include <vector>

#include "ghof/embedding.hpp"
#include "ghof/point_cloud.hpp"

namespace ghof {

struct OrientedPointSet {
  Mat3X points;
  Mat3X normals;

  Eigen::Index size() const { return points.cols(); }
  void validate() const;
};

struct ChartAssignment {
  std::vector<int> labels;  // one per point, in [0, cluster_count)
  int cluster_count = 0;
  MatX centroids;  // dim x cluster_count

  void validate() const;
};

// k nearest columns to column i (self excluded, ties by index) under the 3D
// Euclidean metric.
std::vector<Eigen::Index> euclidean_neighborhood(const Mat3X& X, Eigen::Index i, int k);

// Same, under the full (3+K)-dimensional metric ghat of the lifted embedding.
std::vector<Eigen::Index> geodesic_neighborhood(const LiftedEmbedding& emb,
                                                Eigen::Index i, int k);

// Unit eigenvector of the neighborhood covariance with smallest eigenvalue;
// sign fixed so the largest-magnitude component is positive.
Vec3 estimate_normal(const Mat3X& neighborhood);

// Gamma: mean over ground-truth points of |n_i . m_theta| with theta the
// nearest predicted point.
double normal_consistency(const OrientedPointSet& gt, const OrientedPointSet& pred);

// Lloyd's algorithm with k-means++ seeding over the columns of W (any
// dimension); max 300 iterations or centroid movement < 1e-6. Empty clusters
// are re-seeded to the farthest point.
ChartAssignment decompose_charts(const MatX& W, int cluster_count, std::uint64_t seed);

// Cluster-size-weighted majority-label fraction of an assignment against
// reference part labels.
double chart_purity(const ChartAssignment& charts, const std::vector<int>& ref_labels);

// ||w_i - w_j||^2, which equals ghat^2 - ||x_i - x_j||^2 by construction.
double curvature_proxy(const LiftedEmbedding& emb, Eigen::Index i, Eigen::Index j);

}  // namespace ghof
