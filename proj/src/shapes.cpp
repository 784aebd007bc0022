#include "ghof/shapes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "ghof/rng.hpp"

namespace ghof {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw validation_error(std::string(what) + " must be positive");
}

PointCloud gen_sphere(const ShapeParams& p, Eigen::Index n, Rng& rng) {
  check_positive(p.radius, "radius");
  PointCloud c;
  c.points.resize(3, n);
  c.normals.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec3 dir = rng.unit_vector();
    c.points.col(i) = p.radius * dir;
    c.normals.col(i) = dir;
  }
  return c;
}

PointCloud gen_cube(const ShapeParams& p, Eigen::Index n, Rng& rng) {
  check_positive(p.edge, "edge");
  double h = 0.5 * p.edge;
  PointCloud c;
  c.points.resize(3, n);
  c.normals.resize(3, n);
  c.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int face = int(rng.uniform_index(6));
    int axis = face / 2;
    double sign = (face % 2 == 0) ? 1.0 : -1.0;
    double u = rng.uniform(-h, h);
    double v = rng.uniform(-h, h);
    Vec3 pt = Vec3::Zero(), nrm = Vec3::Zero();
    pt[axis] = sign * h;
    pt[(axis + 1) % 3] = u;
    pt[(axis + 2) % 3] = v;
    nrm[axis] = sign;
    c.points.col(i) = pt;
    c.normals.col(i) = nrm;
    c.labels[i] = face;
  }
  return c;
}

PointCloud gen_cut_cylinder_band(const ShapeParams& p, Eigen::Index n, Rng& rng) {
  check_positive(p.radius, "radius");
  check_positive(p.height, "height");
  if (!(p.angle > 0.0 && p.angle < 2.0 * kPi))
    throw validation_error("angle must lie in (0, 2*pi)");
  PointCloud c;
  c.points.resize(3, n);
  c.normals.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double theta = rng.uniform(0.5 * p.angle, 2.0 * kPi - 0.5 * p.angle);
    double z = rng.uniform(-0.5 * p.height, 0.5 * p.height);
    double ct = std::cos(theta), st = std::sin(theta);
    c.points.col(i) = Vec3(p.radius * ct, p.radius * st, z);
    c.normals.col(i) = Vec3(ct, st, 0.0);
  }
  return c;
}

PointCloud gen_thin_plate(const ShapeParams& p, Eigen::Index n, Rng& rng) {
  check_positive(p.size, "size");
  check_positive(p.thickness, "thickness");
  double s = p.size, t = p.thickness;
  double hs = 0.5 * s, ht = 0.5 * t;
  double face_area = s * s, side_area = s * t;
  double total = 2.0 * face_area + 4.0 * side_area;
  PointCloud c;
  c.points.resize(3, n);
  c.normals.resize(3, n);
  c.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double u = rng.uniform() * total;
    double a = rng.uniform(-hs, hs);
    if (u < 2.0 * face_area) {
      double b = rng.uniform(-hs, hs);
      bool top = u < face_area;
      c.points.col(i) = Vec3(a, b, top ? ht : -ht);
      c.normals.col(i) = Vec3(0, 0, top ? 1.0 : -1.0);
      c.labels[i] = top ? 0 : 1;
    } else {
      double z = rng.uniform(-ht, ht);
      int side = int((u - 2.0 * face_area) / side_area);
      side = std::min(side, 3);
      double sign = (side % 2 == 0) ? 1.0 : -1.0;
      if (side / 2 == 0) {
        c.points.col(i) = Vec3(sign * hs, a, z);
        c.normals.col(i) = Vec3(sign, 0, 0);
      } else {
        c.points.col(i) = Vec3(a, sign * hs, z);
        c.normals.col(i) = Vec3(0, sign, 0);
      }
      c.labels[i] = 2;
    }
  }
  return c;
}

PointCloud gen_torus(const ShapeParams& p, Eigen::Index n, Rng& rng) {
  check_positive(p.minor_radius, "minor_radius");
  if (!(p.major_radius > p.minor_radius))
    throw validation_error("major_radius must exceed minor_radius");
  double R = p.major_radius, r = p.minor_radius;
  PointCloud c;
  c.points.resize(3, n);
  c.normals.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double u, v;
    // Area element is proportional to R + r*cos(v); rejection keeps sampling
    // uniform by area rather than uniform in (u, v).
    do {
      v = rng.uniform(0.0, 2.0 * kPi);
    } while (rng.uniform() * (R + r) > R + r * std::cos(v));
    u = rng.uniform(0.0, 2.0 * kPi);
    double cu = std::cos(u), su = std::sin(u);
    double cv = std::cos(v), sv = std::sin(v);
    c.points.col(i) = Vec3((R + r * cv) * cu, (R + r * cv) * su, r * sv);
    c.normals.col(i) = Vec3(cv * cu, cv * su, sv);
  }
  return c;
}

PointCloud gen_swiss_roll(const ShapeParams& p, Eigen::Index n, Rng& rng) {
  check_positive(p.roll_scale, "roll_scale");
  check_positive(p.width, "width");
  if (!(p.t1 > p.t0) || p.t0 < 0.0)
    throw validation_error("swiss_roll requires 0 <= t0 < t1");
  double dmax = std::sqrt(1.0 + p.t1 * p.t1);
  PointCloud c;
  c.points.resize(3, n);
  c.normals.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double t;
    // Arc length element along the spiral is roll_scale*sqrt(1 + t^2).
    do {
      t = rng.uniform(p.t0, p.t1);
    } while (rng.uniform() * dmax > std::sqrt(1.0 + t * t));
    double y = rng.uniform(-0.5 * p.width, 0.5 * p.width);
    double ct = std::cos(t), st = std::sin(t);
    c.points.col(i) = Vec3(p.roll_scale * t * ct, y, p.roll_scale * t * st);
    double inv = 1.0 / std::sqrt(1.0 + t * t);
    c.normals.col(i) = Vec3((st + t * ct) * inv, 0.0, (t * st - ct) * inv);
  }
  return c;
}

constexpr double kOnSurfaceTol = 1e-6;

double sphere_geodesic(const ShapeParams& p, const Vec3& a, const Vec3& b) {
  double r = p.radius;
  if (std::abs(a.norm() - r) > kOnSurfaceTol || std::abs(b.norm() - r) > kOnSurfaceTol)
    throw validation_error("point is not on the sphere");
  Vec3 u = a.normalized(), v = b.normalized();
  return r * std::atan2(u.cross(v).norm(), u.dot(v));
}

double band_geodesic(const ShapeParams& p, const Vec3& a, const Vec3& b) {
  double r = p.radius, hh = 0.5 * p.height;
  auto unwrap = [&](const Vec3& q) {
    if (std::abs(q.head<2>().norm() - r) > kOnSurfaceTol || std::abs(q.z()) > hh + kOnSurfaceTol)
      throw validation_error("point is not on the cylinder band");
    double theta = std::atan2(q.y(), q.x());
    if (theta < 0.0) theta += 2.0 * kPi;
    double lo = 0.5 * p.angle, hi = 2.0 * kPi - 0.5 * p.angle;
    if (theta < lo - kOnSurfaceTol / r || theta > hi + kOnSurfaceTol / r)
      throw validation_error("point lies inside the removed arc");
    return std::clamp(theta, lo, hi);
  };
  // The band unrolls isometrically to a flat rectangle; geodesics are
  // straight lines there and never cross the removed arc.
  double ta = unwrap(a), tb = unwrap(b);
  return std::hypot(r * (ta - tb), a.z() - b.z());
}

// Plate faces: 0 top (z=+t/2), 1 bottom, 2 x=+s/2, 3 x=-s/2, 4 y=+s/2, 5 y=-s/2.
int plate_face(const ShapeParams& p, const Vec3& q) {
  double hs = 0.5 * p.size, ht = 0.5 * p.thickness;
  if (std::abs(q.x()) > hs + kOnSurfaceTol || std::abs(q.y()) > hs + kOnSurfaceTol ||
      std::abs(q.z()) > ht + kOnSurfaceTol)
    throw validation_error("point is not on the plate");
  double d[6] = {std::abs(q.z() - ht), std::abs(q.z() + ht), std::abs(q.x() - hs),
                 std::abs(q.x() + hs), std::abs(q.y() - hs), std::abs(q.y() + hs)};
  int best = 0;
  for (int f = 1; f < 6; ++f)
    if (d[f] < d[best]) best = f;
  if (d[best] > kOnSurfaceTol) throw validation_error("point is not on the plate");
  return best;
}

double plate_geodesic(const ShapeParams& p, const Vec3& a, const Vec3& b) {
  double hs = 0.5 * p.size, ht = 0.5 * p.thickness, t = p.thickness;
  int fa = plate_face(p, a), fb = plate_face(p, b);
  if (fa == fb) return (a - b).norm();
  if (fa > fb) return plate_geodesic(p, b, a);
  // fa < fb, so fa is top or bottom whenever the pair is supported.
  if (fa >= 2) throw validation_error("side-to-side plate geodesics are not supported");
  if (fb == 1) {
    // Top to bottom: shortest of the four unrollings around one side face.
    double dx = b.x() - a.x(), dy = b.y() - a.y();
    double viaxp = std::hypot(2.0 * hs + t - b.x() - a.x(), dy);
    double viaxm = std::hypot(2.0 * hs + t + b.x() + a.x(), dy);
    double viayp = std::hypot(dx, 2.0 * hs + t - b.y() - a.y());
    double viaym = std::hypot(dx, 2.0 * hs + t + b.y() + a.y());
    return std::min(std::min(viaxp, viaxm), std::min(viayp, viaym));
  }
  // Top or bottom to a side face: unroll the side into the face plane.
  double depth = (fa == 0) ? ht - b.z() : b.z() + ht;
  double along, perp;
  switch (fb) {
    case 2: along = hs + depth - a.x(); perp = b.y() - a.y(); break;
    case 3: along = a.x() + hs + depth; perp = b.y() - a.y(); break;
    case 4: along = hs + depth - a.y(); perp = b.x() - a.x(); break;
    default: along = a.y() + hs + depth; perp = b.x() - a.x(); break;
  }
  return std::hypot(along, perp);
}

}  // namespace

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "sphere") return ShapeKind::sphere;
  if (name == "cube") return ShapeKind::cube;
  if (name == "cut_cylinder_band") return ShapeKind::cut_cylinder_band;
  if (name == "thin_plate") return ShapeKind::thin_plate;
  if (name == "torus") return ShapeKind::torus;
  if (name == "swiss_roll") return ShapeKind::swiss_roll;
  throw validation_error("unknown shape kind: " + name);
}

std::string shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cube: return "cube";
    case ShapeKind::cut_cylinder_band: return "cut_cylinder_band";
    case ShapeKind::thin_plate: return "thin_plate";
    case ShapeKind::torus: return "torus";
    case ShapeKind::swiss_roll: return "swiss_roll";
  }
  throw validation_error("unknown shape kind");
}

PointCloud gen_shape(ShapeKind kind, const ShapeParams& params, Eigen::Index n,
                     std::uint64_t seed) {
  if (n < 1) throw validation_error("gen_shape requires n >= 1");
  Rng rng(derive_seed(seed, shape_kind_name(kind)));
  switch (kind) {
    case ShapeKind::sphere: return gen_sphere(params, n, rng);
    case ShapeKind::cube: return gen_cube(params, n, rng);
    case ShapeKind::cut_cylinder_band: return gen_cut_cylinder_band(params, n, rng);
    case ShapeKind::thin_plate: return gen_thin_plate(params, n, rng);
    case ShapeKind::torus: return gen_torus(params, n, rng);
    case ShapeKind::swiss_roll: return gen_swiss_roll(params, n, rng);
  }
  throw validation_error("unknown shape kind");
}

double analytic_geodesic(ShapeKind kind, const ShapeParams& params, const Vec3& p,
                         const Vec3& q) {
  switch (kind) {
    case ShapeKind::sphere: return sphere_geodesic(params, p, q);
    case ShapeKind::cut_cylinder_band: return band_geodesic(params, p, q);
    case ShapeKind::thin_plate: return plate_geodesic(params, p, q);
    default:
      throw validation_error("analytic geodesic not available for " +
                             shape_kind_name(kind));
  }
}

}  // namespace ghof
