#include "ghof/losses.hpp"

#include <cmath>
#include <limits>

#include "ghof/knn.hpp"
#include "ghof/parallel.hpp"

namespace ghof {

namespace {

constexpr Eigen::Index kChunk = 256;

// Per-chunk partial sums combined in chunk order, so totals do not depend on
// the worker count.
template <typename Fn>
double chunked_sum(Eigen::Index n, Fn&& per_index) {
  Eigen::Index nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(n, kChunk, [&](Eigen::Index b, Eigen::Index e) {
    double s = 0.0;
    for (Eigen::Index i = b; i < e; ++i) s += per_index(i);
    partial[b / kChunk] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

void check_nonempty(const Mat3X& X, const Mat3X& Y) {
  if (X.cols() == 0 || Y.cols() == 0)
    throw validation_error("chamfer requires non-empty point sets");
}

std::vector<Eigen::Index> argmins(const Mat3X& from, const Mat3X& to) {
  std::vector<Eigen::Index> idx(from.cols());
  parallel_for(from.cols(), kChunk, [&](Eigen::Index b, Eigen::Index e) {
    for (Eigen::Index i = b; i < e; ++i) idx[i] = nearest(to, from.col(i)).first;
  });
  return idx;
}

}  // namespace

void LossWeights::validate() const {
  if (!std::isfinite(lambda_c) || !std::isfinite(lambda_g) || lambda_c < 0.0 ||
      lambda_g < 0.0)
    throw validation_error("loss weights must be finite and nonnegative");
  if (lambda_c == 0.0 && lambda_g == 0.0)
    throw validation_error("loss weights must not both be zero");
}

double chamfer(const Mat3X& X, const Mat3X& Y) {
  check_nonempty(X, Y);
  double sx = chunked_sum(X.cols(), [&](Eigen::Index i) {
    return nearest(Y, X.col(i)).second;
  });
  double sy = chunked_sum(Y.cols(), [&](Eigen::Index j) {
    return nearest(X, Y.col(j)).second;
  });
  return sx / double(X.cols()) + sy / double(Y.cols());
}

Mat3X chamfer_grad(const Mat3X& X, const Mat3X& Y) {
  check_nonempty(X, Y);
  std::vector<Eigen::Index> nx = argmins(X, Y);
  std::vector<Eigen::Index> ny = argmins(Y, X);
  Mat3X grad = Mat3X::Zero(3, X.cols());
  double inv_x = 2.0 / double(X.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i)
    grad.col(i) = inv_x * (X.col(i) - Y.col(nx[i]));
  double inv_y = 2.0 / double(Y.cols());
  for (Eigen::Index j = 0; j < Y.cols(); ++j)
    grad.col(ny[j]) += inv_y * (X.col(ny[j]) - Y.col(j));
  return grad;
}

double geodesic_loss(const MatX& Z, const std::vector<PairTarget>& targets) {
  Eigen::Index n = Z.cols();
  if (n == 0) throw validation_error("geodesic_loss on an empty embedding");
  for (const auto& t : targets) {
    if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
      throw validation_error("pair target index out of range");
    if (!(t.g >= 0.0)) throw validation_error("pair target distance must be >= 0");
  }
  double s = chunked_sum(Eigen::Index(targets.size()), [&](Eigen::Index t) {
    const PairTarget& p = targets[t];
    double d = (Z.col(p.i) - Z.col(p.j)).norm() - p.g;
    return d * d;
  });
  return s / (double(n) * double(n));
}

MatX geodesic_loss_grad(const MatX& Z, const std::vector<PairTarget>& targets) {
  Eigen::Index n = Z.cols();
  geodesic_loss(Z, targets);  // runs the same validation
  MatX grad = MatX::Zero(Z.rows(), n);
  double inv = 1.0 / (double(n) * double(n));
  VecX diff(Z.rows());
  for (const auto& t : targets) {
    diff = Z.col(t.i) - Z.col(t.j);
    double d = diff.norm();
    if (d == 0.0) continue;
    double c = inv * 2.0 * (d - t.g) / d;
    grad.col(t.i) += c * diff;
    grad.col(t.j) -= c * diff;
  }
  return grad;
}

LossReport total_loss(const Mat3X& X_pred, const Mat3X& Y_gt, const MatX& Z,
                      const std::vector<PairTarget>& targets,
                      const LossWeights& weights) {
  weights.validate();
  if (X_pred.cols() != Z.cols() || Z.rows() < 3 ||
      !(X_pred.array() == Z.topRows(3).array()).all())
    throw validation_error("X_pred must be the point-coordinate view of Z");
  LossReport r;
  r.chamfer = chamfer(X_pred, Y_gt);
  r.geodesic = geodesic_loss(Z, targets);
  r.total = weights.lambda_c * r.chamfer + weights.lambda_g * r.geodesic;
  r.pair_count = std::int64_t(targets.size());
  return r;
}

}  // namespace ghof
