#pragma once

#include <utility>
#include <vector>

#include "ghof/common.hpp"

namespace ghof {

// Surface samples with optional unit normals and optional part labels.
// Columns are points; normals (if any) share column indices with points.
struct PointCloud {
  Mat3X points;              // 3 x n
  Mat3X normals;             // 3 x n, or 3 x 0 when absent
  std::vector<int> labels;   // size n, or empty when absent

  Eigen::Index size() const { return points.cols(); }
  bool has_normals() const { return normals.cols() > 0; }
  bool has_labels() const { return !labels.empty(); }

  // Checks the type invariants: finite coordinates, unit normals, matching
  // counts. Throws validation_error.
  void validate() const;
};

// Points in the canonical domain M (the closed unit ball in R^3).
struct SampleSet {
  Mat3X samples;  // 3 x n
  int domain_dim = 3;

  Eigen::Index size() const { return samples.cols(); }
  void validate() const;
};

// original = normalized * scale + center
struct BoxTransform {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  Vec3 to_original(const Vec3& p) const { return p * scale + center; }
  Vec3 to_normalized(const Vec3& p) const { return (p - center) / scale; }
};

// Centers the cloud's bounding box at the origin and scales its longest side
// to exactly 1. Normals are unchanged (uniform scale). The returned transform
// maps normalized points back to input coordinates.
std::pair<PointCloud, BoxTransform> normalize_to_unit_box(const PointCloud& cloud);

// n points uniform in the closed unit ball, deterministic in seed.
// Direction is a normalized 3D Gaussian, radius is U^(1/3).
SampleSet sample_unit_ball(Eigen::Index n, std::uint64_t seed);

}  // namespace ghof
