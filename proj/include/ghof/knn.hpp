#pragma once

#include <vector>

#include "ghof/common.hpp"

namespace ghof {

// k nearest neighbors of every point among the other points, by Euclidean
// distance, self excluded. Each list is sorted by (distance, index) with ties
// broken by ascending index. Requires 1 <= k < n.
std::vector<std::vector<Eigen::Index>> knn(const Mat3X& points, int k);

// Indices and squared distances of the k nearest columns of cloud to q, ties
// by ascending index. No self-exclusion. Requires 1 <= k <= cloud.cols().
void knearest(const Mat3X& cloud, const Vec3& q, int k, Eigen::Index* out_idx,
              double* out_d2);

// Single nearest column of cloud to q, ties by ascending index.
std::pair<Eigen::Index, double> nearest(const Mat3X& cloud, const Vec3& q);

}  // namespace ghof
