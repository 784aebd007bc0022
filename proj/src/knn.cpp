#include "ghof/knn.hpp"

#include <algorithm>
#include <limits>

#include "ghof/parallel.hpp"

namespace ghof {

namespace {

inline double dist2(const Mat3X& pts, Eigen::Index i, const Vec3& q) {
  double dx = pts(0, i) - q.x();
  double dy = pts(1, i) - q.y();
  double dz = pts(2, i) - q.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

std::vector<std::vector<Eigen::Index>> knn(const Mat3X& points, int k) {
  Eigen::Index n = points.cols();
  if (k < 1) throw validation_error("knn requires k >= 1");
  if (k >= n) throw validation_error("knn requires k < n");
  std::vector<std::vector<Eigen::Index>> out(n);
  parallel_for(n, 256, [&](Eigen::Index b, Eigen::Index e) {
    std::vector<std::pair<double, Eigen::Index>> cand(n - 1);
    for (Eigen::Index i = b; i < e; ++i) {
      Vec3 q = points.col(i);
      Eigen::Index m = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        cand[m++] = {dist2(points, j, q), j};
      }
      std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
      out[i].resize(k);
      for (int t = 0; t < k; ++t) out[i][t] = cand[t].second;
    }
  });
  return out;
}

void knearest(const Mat3X& cloud, const Vec3& q, int k, Eigen::Index* out_idx,
              double* out_d2) {
  Eigen::Index n = cloud.cols();
  if (k < 1 || k > n) throw validation_error("knearest requires 1 <= k <= n");
  // Insertion into a small sorted buffer; k is tiny everywhere we call this.
  for (int t = 0; t < k; ++t) {
    out_d2[t] = std::numeric_limits<double>::infinity();
    out_idx[t] = -1;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double d2 = dist2(cloud, j, q);
    if (d2 >= out_d2[k - 1]) continue;
    int t = k - 1;
    while (t > 0 && out_d2[t - 1] > d2) {
      out_d2[t] = out_d2[t - 1];
      out_idx[t] = out_idx[t - 1];
      --t;
    }
    out_d2[t] = d2;
    out_idx[t] = j;
  }
}

std::pair<Eigen::Index, double> nearest(const Mat3X& cloud, const Vec3& q) {
  Eigen::Index idx;
  double d2;
  knearest(cloud, q, 1, &idx, &d2);
  return {idx, d2};
}

}  // namespace ghof
