#include "ghof/soft_geodesic.hpp"

#include <cmath>
#include <utility>

#include "ghof/knn.hpp"
#include "ghof/parallel.hpp"

namespace ghof {

namespace {

struct EndpointWeights {
  std::vector<Eigen::Index> idx;
  VecX w;  // softmax of -bandwidth * d^2 over Lambda(x)
};

EndpointWeights endpoint_weights(const SoftGeodesicContext& ctx, const Vec3& x) {
  int k = ctx.k_lambda;
  EndpointWeights ew;
  ew.idx.resize(k);
  VecX d2(k);
  knearest(ctx.graph->vertices, x, k, ew.idx.data(), d2.data());
  VecX logits = -ctx.bandwidth * d2;
  double mx = logits.maxCoeff();
  ew.w = (logits.array() - mx).exp();
  ew.w /= ew.w.sum();
  return ew;
}

}  // namespace

void SoftGeodesicContext::validate() const {
  if (!graph || !D) throw validation_error("soft geodesic context is incomplete");
  if (graph->size() != D->size())
    throw validation_error("graph and geodesic matrix vertex counts differ");
  if (k_lambda < 1) throw validation_error("k_lambda must be >= 1");
  if (k_lambda > graph->size())
    throw validation_error("k_lambda exceeds the vertex count");
  if (!(bandwidth > 0.0)) throw validation_error("bandwidth must be positive");
}

double default_bandwidth(const NeighborGraph& graph) {
  double h = mean_edge_length(graph);
  return 1.0 / (h * h);
}

double rbf(const Vec3& a, const Vec3& b, double bandwidth) {
  if (!(bandwidth > 0.0)) throw validation_error("bandwidth must be positive");
  return std::exp(-bandwidth * (a - b).squaredNorm());
}

PathConfidences path_confidences(const SoftGeodesicContext& ctx, const Vec3& x_i,
                                 const Vec3& x_j) {
  ctx.validate();
  EndpointWeights wi = endpoint_weights(ctx, x_i);
  EndpointWeights wj = endpoint_weights(ctx, x_j);
  PathConfidences pc;
  pc.alpha = wi.w * wj.w.transpose();
  pc.lambda_i = std::move(wi.idx);
  pc.lambda_j = std::move(wj.idx);
  return pc;
}

namespace {

double weighted_distance(const SoftGeodesicContext& ctx, const EndpointWeights& wi,
                         const EndpointWeights& wj) {
  double g = 0.0;
  for (int p = 0; p < ctx.k_lambda; ++p) {
    double row = 0.0;
    for (int q = 0; q < ctx.k_lambda; ++q)
      row += wj.w[q] * ctx.D->distances(wi.idx[p], wj.idx[q]);
    g += wi.w[p] * row;
  }
  return g;
}

// Accumulation order depends on which endpoint comes first, so the pair is
// put into a canonical order to make g(x_i, x_j) == g(x_j, x_i) bitwise.
bool lex_before(const Vec3& a, const Vec3& b) {
  for (int d = 0; d < 3; ++d) {
    if (a[d] < b[d]) return true;
    if (a[d] > b[d]) return false;
  }
  return false;
}

}  // namespace

double soft_geodesic(const SoftGeodesicContext& ctx, const Vec3& x_i, const Vec3& x_j) {
  ctx.validate();
  const Vec3 &a = lex_before(x_j, x_i) ? x_j : x_i, &b = lex_before(x_j, x_i) ? x_i : x_j;
  return weighted_distance(ctx, endpoint_weights(ctx, a), endpoint_weights(ctx, b));
}

std::vector<double> soft_geodesic_batch(
    const SoftGeodesicContext& ctx, const Mat3X& X,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs) {
  ctx.validate();
  Eigen::Index n = X.cols();
  std::vector<char> used(n, 0);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw validation_error("pair index out of range");
    used[i] = used[j] = 1;
  }
  std::vector<EndpointWeights> ew(n);
  parallel_for(n, 64, [&](Eigen::Index b, Eigen::Index e) {
    for (Eigen::Index i = b; i < e; ++i)
      if (used[i]) ew[i] = endpoint_weights(ctx, X.col(i));
  });
  std::vector<double> out(pairs.size());
  parallel_for(Eigen::Index(pairs.size()), 512, [&](Eigen::Index b, Eigen::Index e) {
    for (Eigen::Index t = b; t < e; ++t) {
      auto [i, j] = pairs[t];
      if (lex_before(X.col(j), X.col(i))) std::swap(i, j);
      out[t] = weighted_distance(ctx, ew[i], ew[j]);
    }
  });
  return out;
}

}  // namespace ghof
