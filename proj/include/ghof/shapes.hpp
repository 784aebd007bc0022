#pragma once

#include <string>

#include "ghof/point_cloud.hpp"

namespace ghof {

enum class ShapeKind { sphere, cube, cut_cylinder_band, thin_plate, torus, swiss_roll };

ShapeKind parse_shape_kind(const std::string& name);
std::string shape_kind_name(ShapeKind kind);

// Per-kind parameters; unused fields are ignored.
//   sphere: radius
//   cube: edge
//   cut_cylinder_band: radius, height, angle (removed arc, radians; band
//     covers theta in [angle/2, 2pi - angle/2])
//   thin_plate: size (square side), thickness
//   torus: major_radius, minor_radius
//   swiss_roll: roll_scale (radius = roll_scale * t), t0, t1, width (extent in y)
struct ShapeParams {
  double radius = 1.0;
  double edge = 1.0;
  double height = 1.0;
  double angle = 1.5707963267948966;
  double size = 1.0;
  double thickness = 0.02;
  double major_radius = 0.35;
  double minor_radius = 0.15;
  double roll_scale = 0.035367765131532756;  // 0.5 / (4.5*pi)
  double t0 = 4.71238898038469;              // 1.5*pi
  double t1 = 14.137166941154069;            // 4.5*pi
  double width = 1.0;
};

// n points sampled uniformly by area, with analytic unit normals. Labels:
// cube -> face id 0..5; thin_plate -> 0 top, 1 bottom, 2 edge; others none.
// Shapes are centered at the origin in their natural units (no box
// normalization here).
PointCloud gen_shape(ShapeKind kind, const ShapeParams& params, Eigen::Index n,
                     std::uint64_t seed);

// Exact surface geodesic between two on-surface points. Supported kinds:
// sphere, cut_cylinder_band, thin_plate (same-face, top/bottom to side, and
// top to bottom; side-to-side pairs are not supported). Points are projected
// onto the surface if within 1e-6.
double analytic_geodesic(ShapeKind kind, const ShapeParams& params, const Vec3& p,
                         const Vec3& q);

}  // namespace ghof
