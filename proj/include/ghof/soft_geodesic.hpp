#pragma once

#include <utility>
#include <vector>

#include "ghof/geodesics.hpp"

namespace ghof {

// Differentiable soft geodesic target (Eqs. 4-7): neighbor sets Lambda(x),
// RBF confidences, and the confidence-weighted average of graph distances.
// Non-owning; graph and D must outlive the context.
struct SoftGeodesicContext {
  const NeighborGraph* graph = nullptr;
  const GeodesicMatrix* D = nullptr;
  int k_lambda = 4;
  double bandwidth = 1.0;

  void validate() const;
};

// 1/h^2 with h the mean graph edge length. The paper's literal exponent
// coefficient (1 on squared distances) is bandwidth = 1.
double default_bandwidth(const NeighborGraph& graph);

// exp(-bandwidth * ||a-b||^2)
double rbf(const Vec3& a, const Vec3& b, double bandwidth);

struct PathConfidences {
  MatX alpha;                          // k_lambda x k_lambda, sums to 1
  std::vector<Eigen::Index> lambda_i;  // Lambda(x_i), ascending distance
  std::vector<Eigen::Index> lambda_j;  // Lambda(x_j)
};

// alpha[p][q] = gamma_pq / sum(gamma). gamma factorizes over endpoints, so
// alpha is the outer product of two per-endpoint softmaxes; both are computed
// in log space with max subtraction and never produce NaN.
PathConfidences path_confidences(const SoftGeodesicContext& ctx, const Vec3& x_i,
                                 const Vec3& x_j);

// g(x_i, x_j) = sum_pq alpha_pq * D(v_i^p, v_j^q)
double soft_geodesic(const SoftGeodesicContext& ctx, const Vec3& x_i, const Vec3& x_j);

// Elementwise soft_geodesic over pairs of columns of X; Lambda lookups are
// computed once per referenced point and reused.
std::vector<double> soft_geodesic_batch(
    const SoftGeodesicContext& ctx, const Mat3X& X,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs);

}  // namespace ghof
