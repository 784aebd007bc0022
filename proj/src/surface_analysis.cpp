#include "ghof/surface_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ghof/knn.hpp"
#include "ghof/parallel.hpp"
#include "ghof/rng.hpp"

namespace ghof {

namespace {

std::vector<Eigen::Index> nearest_columns(const MatX& P, Eigen::Index i, int k) {
  Eigen::Index n = P.cols();
  if (i < 0 || i >= n) throw validation_error("neighborhood index out of range");
  if (k < 1 || k >= n) throw validation_error("neighborhood requires 1 <= k < n");
  std::vector<std::pair<double, Eigen::Index>> cand;
  cand.reserve(n - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    cand.emplace_back((P.col(j) - P.col(i)).squaredNorm(), j);
  }
  std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
  std::vector<Eigen::Index> out(k);
  for (int t = 0; t < k; ++t) out[t] = cand[t].second;
  return out;
}

}  // namespace

void OrientedPointSet::validate() const {
  if (points.cols() == 0) throw validation_error("oriented set is empty");
  if (normals.cols() != points.cols())
    throw validation_error("oriented set normal count mismatch");
  for (Eigen::Index i = 0; i < normals.cols(); ++i)
    if (std::abs(normals.col(i).norm() - 1.0) > 1e-6)
      throw validation_error("oriented set normal is not unit length");
}

void ChartAssignment::validate() const {
  if (cluster_count < 1) throw validation_error("cluster_count must be >= 1");
  if (centroids.cols() != cluster_count)
    throw validation_error("centroid count mismatch");
  std::vector<char> seen(cluster_count, 0);
  for (int l : labels) {
    if (l < 0 || l >= cluster_count) throw validation_error("chart label out of range");
    seen[l] = 1;
  }
  for (char s : seen)
    if (!s) throw validation_error("chart assignment has an empty cluster");
}

std::vector<Eigen::Index> euclidean_neighborhood(const Mat3X& X, Eigen::Index i,
                                                 int k) {
  return nearest_columns(X, i, k);
}

std::vector<Eigen::Index> geodesic_neighborhood(const LiftedEmbedding& emb,
                                                Eigen::Index i, int k) {
  return nearest_columns(emb.Z, i, k);
}

Vec3 estimate_normal(const Mat3X& neighborhood) {
  Eigen::Index m = neighborhood.cols();
  if (m < 3) throw validation_error("normal estimation needs at least 3 points");
  Vec3 mean = neighborhood.rowwise().mean();
  Mat3X centered = neighborhood.colwise() - mean;
  Eigen::Matrix3d cov = centered * centered.transpose() / double(m);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Vec3& ev = es.eigenvalues();  // ascending
  if (!(ev[2] > 0.0) || ev[1] <= 1e-12 * ev[2])
    throw validation_error("degenerate neighborhood: points are collinear or coincident");
  Vec3 nrm = es.eigenvectors().col(0);
  nrm.normalize();
  int arg = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(nrm[c]) > std::abs(nrm[arg])) arg = c;
  if (nrm[arg] < 0.0) nrm = -nrm;
  return nrm;
}

double normal_consistency(const OrientedPointSet& gt, const OrientedPointSet& pred) {
  gt.validate();
  pred.validate();
  Eigen::Index n = gt.size();
  std::vector<double> dots(n);
  parallel_for(n, 256, [&](Eigen::Index b, Eigen::Index e) {
    for (Eigen::Index i = b; i < e; ++i) {
      Eigen::Index j = nearest(pred.points, gt.points.col(i)).first;
      dots[i] = std::abs(gt.normals.col(i).dot(pred.normals.col(j)));
    }
  });
  double sum = 0.0;
  for (double d : dots) sum += d;
  return sum / double(n);
}

ChartAssignment decompose_charts(const MatX& W, int cluster_count, std::uint64_t seed) {
  Eigen::Index n = W.cols();
  if (cluster_count < 1) throw validation_error("cluster_count must be >= 1");
  if (Eigen::Index(cluster_count) > n)
    throw validation_error("cluster_count exceeds the point count");
  Eigen::Index K = cluster_count;
  Rng rng(seed);

  MatX centroids(W.rows(), K);
  VecX best_d2 = VecX::Constant(n, std::numeric_limits<double>::infinity());
  centroids.col(0) = W.col(Eigen::Index(rng.uniform_index(std::uint64_t(n))));
  for (Eigen::Index c = 1; c < K; ++c) {
    for (Eigen::Index i = 0; i < n; ++i)
      best_d2[i] =
          std::min(best_d2[i], (W.col(i) - centroids.col(c - 1)).squaredNorm());
    double total = best_d2.sum();
    Eigen::Index pick;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += best_d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = Eigen::Index(rng.uniform_index(std::uint64_t(n)));
    }
    centroids.col(c) = W.col(pick);
  }

  std::vector<int> labels(n, 0);
  std::vector<double> label_d2(n, 0.0);
  std::vector<Eigen::Index> counts(K);
  MatX sums(W.rows(), K);
  for (int iter = 0; iter < 300; ++iter) {
    parallel_for(n, 512, [&](Eigen::Index b, Eigen::Index e) {
      for (Eigen::Index i = b; i < e; ++i) {
        int arg = 0;
        double bd = (W.col(i) - centroids.col(0)).squaredNorm();
        for (Eigen::Index c = 1; c < K; ++c) {
          double d2 = (W.col(i) - centroids.col(c)).squaredNorm();
          if (d2 < bd) {
            bd = d2;
            arg = int(c);
          }
        }
        labels[i] = arg;
        label_d2[i] = bd;
      }
    });

    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) ++counts[labels[i]];
    bool reseeded = false;
    for (Eigen::Index c = 0; c < K; ++c) {
      if (counts[c] > 0) continue;
      Eigen::Index far = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (label_d2[i] > label_d2[far]) far = i;
      --counts[labels[far]];
      labels[far] = int(c);
      counts[c] = 1;
      label_d2[far] = 0.0;  // keeps a second empty cluster from taking the same point
      reseeded = true;
    }

    sums.setZero();
    for (Eigen::Index i = 0; i < n; ++i) sums.col(labels[i]) += W.col(i);
    double moved = 0.0;
    for (Eigen::Index c = 0; c < K; ++c) {
      VecX nc = sums.col(c) / double(counts[c]);
      moved = std::max(moved, (nc - centroids.col(c)).norm());
      centroids.col(c) = nc;
    }
    if (moved < 1e-6 && !reseeded) break;
  }

  ChartAssignment out;
  out.labels = std::move(labels);
  out.cluster_count = int(K);
  out.centroids = std::move(centroids);
  out.validate();
  return out;
}

double chart_purity(const ChartAssignment& charts, const std::vector<int>& ref_labels) {
  if (ref_labels.size() != charts.labels.size())
    throw validation_error("purity needs one reference label per point");
  if (ref_labels.empty()) throw validation_error("purity on an empty assignment");
  int K = charts.cluster_count;
  int L = 0;
  for (int r : ref_labels) {
    if (r < 0) throw validation_error("reference labels must be nonnegative");
    L = std::max(L, r + 1);
  }
  MatX counts = MatX::Zero(K, L);
  for (std::size_t i = 0; i < ref_labels.size(); ++i)
    counts(charts.labels[i], ref_labels[i]) += 1.0;
  double majority = 0.0;
  for (int c = 0; c < K; ++c) majority += counts.row(c).maxCoeff();
  return majority / double(ref_labels.size());
}

double curvature_proxy(const LiftedEmbedding& emb, Eigen::Index i, Eigen::Index j) {
  if (i < 0 || i >= emb.size() || j < 0 || j >= emb.size())
    throw validation_error("curvature proxy index out of range");
  return (emb.W().col(i) - emb.W().col(j)).squaredNorm();
}

}  // namespace ghof
