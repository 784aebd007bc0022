#include "ghof/point_cloud.hpp"

#include <cmath>

#include "ghof/rng.hpp"

namespace ghof {

void PointCloud::validate() const {
  if (!points.allFinite()) throw validation_error("point cloud has non-finite coordinates");
  if (has_normals()) {
    if (normals.cols() != points.cols())
      throw validation_error("normal count does not match point count");
    for (Eigen::Index i = 0; i < normals.cols(); ++i) {
      double n = normals.col(i).norm();
      if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6)
        throw validation_error("normal " + std::to_string(i) + " is not unit length");
    }
  }
  if (has_labels() && Eigen::Index(labels.size()) != points.cols())
    throw validation_error("label count does not match point count");
}

void SampleSet::validate() const {
  if (domain_dim != 3) throw validation_error("domain_dim must be 3");
  for (Eigen::Index i = 0; i < samples.cols(); ++i)
    if (samples.col(i).norm() > 1.0 + 1e-9)
      throw validation_error("sample outside the unit ball");
}

std::pair<PointCloud, BoxTransform> normalize_to_unit_box(const PointCloud& cloud) {
  if (cloud.size() == 0) throw validation_error("cannot normalize an empty cloud");
  cloud.validate();
  Vec3 lo = cloud.points.rowwise().minCoeff();
  Vec3 hi = cloud.points.rowwise().maxCoeff();
  double longest = (hi - lo).maxCoeff();
  if (longest <= 0.0) throw validation_error("degenerate cloud: zero extent on every axis");
  BoxTransform t;
  t.center = 0.5 * (lo + hi);
  t.scale = longest;
  PointCloud out = cloud;
  out.points = (cloud.points.colwise() - t.center) / t.scale;
  return {std::move(out), t};
}

SampleSet sample_unit_ball(Eigen::Index n, std::uint64_t seed) {
  if (n < 0) throw validation_error("negative sample count");
  SampleSet s;
  s.samples.resize(3, n);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) s.samples.col(i) = rng.ball_point();
  return s;
}

}  // namespace ghof
