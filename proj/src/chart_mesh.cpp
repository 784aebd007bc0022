#include "ghof/chart_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <Eigen/Geometry>

#include "ghof/adam.hpp"
#include "ghof/losses.hpp"

namespace ghof {

namespace {

constexpr Eigen::Index kUvBatch = 1024;
constexpr double kDropArea = 1e-14;

double face_area(const TriangleMesh& m, Eigen::Index f) {
  Vec3 a = m.vertices.col(m.faces(0, f));
  Vec3 b = m.vertices.col(m.faces(1, f));
  Vec3 c = m.vertices.col(m.faces(2, f));
  return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

void TriangleMesh::validate() const {
  Eigen::Index n = vertices.cols();
  if (Eigen::Index(face_chart.size()) != faces.cols())
    throw validation_error("face_chart size does not match face count");
  for (Eigen::Index f = 0; f < faces.cols(); ++f) {
    int a = faces(0, f), b = faces(1, f), c = faces(2, f);
    if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n)
      throw validation_error("face index out of range");
    if (a == b || b == c || a == c)
      throw validation_error("face repeats a vertex index");
  }
  if (!vertices.allFinite()) throw validation_error("mesh has non-finite vertices");
}

ChartSurface fit_chart(const Mat3X& target, int chart_id, std::int64_t steps,
                       std::uint64_t seed) {
  if (target.cols() < 16) throw validation_error("chart has fewer than 16 points");
  if (steps < 1) throw validation_error("fit_chart requires steps >= 1");
  ChartSurface surf;
  surf.chart_id = chart_id;
  surf.uv_net =
      init_network<double>({2, 64, 64, 3}, Activation::tanh, derive_seed(seed, "uv"));
  AdamState<double> adam;
  adam.lr = 1e-3;
  adam.reset(surf.uv_net.params.size());

  Rng rng(derive_seed(seed, "uvbatch"));
  MlpWorkspace<double> ws;
  MatX uv(2, kUvBatch);
  VecX grad;
  surf.fit_trace.reserve(steps);
  for (std::int64_t s = 0; s < steps; ++s) {
    for (Eigen::Index i = 0; i < kUvBatch; ++i) {
      uv(0, i) = rng.uniform();
      uv(1, i) = rng.uniform();
    }
    const MatX& out = forward(surf.uv_net, uv, ws);
    Mat3X pred = out;
    double loss = chamfer(pred, target);
    if (!std::isfinite(loss))
      throw numerical_error("chart fit diverged at step " + std::to_string(s));
    surf.fit_trace.push_back(loss);
    MatX d_out = chamfer_grad(pred, target);
    backward(surf.uv_net, ws, d_out, grad);
    adam.step(surf.uv_net.params, grad);
  }
  return surf;
}

TriangleMesh triangulate_chart(const ChartSurface& surface, int res) {
  if (res < 2) throw validation_error("triangulate_chart requires res >= 2");
  surface.uv_net.validate();
  if (surface.uv_net.in_dim() != 2 || surface.uv_net.out_dim() != 3)
    throw validation_error("uv net must map R^2 to R^3");
  Eigen::Index nv = Eigen::Index(res) * res;
  MatX uv(2, nv);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      Eigen::Index v = Eigen::Index(j) * res + i;
      uv(0, v) = double(i) / (res - 1);
      uv(1, v) = double(j) / (res - 1);
    }
  MlpWorkspace<double> ws;
  TriangleMesh mesh;
  mesh.vertices = forward(surface.uv_net, uv, ws);
  Eigen::Index nf = 2 * Eigen::Index(res - 1) * (res - 1);
  mesh.faces.resize(3, nf);
  mesh.face_chart.assign(nf, surface.chart_id);
  Eigen::Index f = 0;
  for (int j = 0; j + 1 < res; ++j)
    for (int i = 0; i + 1 < res; ++i) {
      int a = j * res + i;
      int b = j * res + i + 1;
      int c = (j + 1) * res + i;
      int d = (j + 1) * res + i + 1;
      mesh.faces.col(f++) = Eigen::Vector3i(a, b, c);
      mesh.faces.col(f++) = Eigen::Vector3i(b, d, c);
    }
  mesh.validate();
  return mesh;
}

TriangleMesh assemble_mesh(const std::vector<TriangleMesh>& charts) {
  if (charts.empty()) throw validation_error("assemble_mesh needs at least one chart");
  Eigen::Index nv = 0, nf = 0;
  for (const auto& c : charts) {
    c.validate();
    nv += c.vertices.cols();
    nf += c.face_count();
  }
  TriangleMesh out;
  out.vertices.resize(3, nv);
  out.faces.resize(3, nf);
  out.face_chart.reserve(nf);
  Eigen::Index voff = 0, f = 0;
  for (const auto& c : charts) {
    out.vertices.middleCols(voff, c.vertices.cols()) = c.vertices;
    for (Eigen::Index cf = 0; cf < c.face_count(); ++cf) {
      Eigen::Vector3i face = c.faces.col(cf) + Eigen::Vector3i::Constant(int(voff));
      out.faces.col(f) = face;
      out.face_chart.push_back(c.face_chart[cf]);
      ++f;
    }
    voff += c.vertices.cols();
  }
  // Drop collapsed faces.
  Eigen::Index keep = 0;
  for (Eigen::Index cf = 0; cf < nf; ++cf) {
    if (face_area(out, cf) < kDropArea) continue;
    out.faces.col(keep) = out.faces.col(cf);
    out.face_chart[keep] = out.face_chart[cf];
    ++keep;
  }
  out.faces.conservativeResize(3, keep);
  out.face_chart.resize(keep);
  out.validate();
  return out;
}

OrientedPointSet sample_mesh_surface(const TriangleMesh& mesh, Eigen::Index n,
                                     std::uint64_t seed) {
  mesh.validate();
  if (mesh.face_count() == 0) throw validation_error("mesh has no faces");
  std::vector<double> cum(mesh.face_count());
  double total = 0.0;
  for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
    total += face_area(mesh, f);
    cum[f] = total;
  }
  if (!(total > 0.0)) throw validation_error("mesh has zero total area");
  OrientedPointSet out;
  out.points.resize(3, n);
  out.normals.resize(3, n);
  Rng rng(seed);
  for (Eigen::Index s = 0; s < n; ++s) {
    double u = rng.uniform() * total;
    Eigen::Index f =
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
    if (f >= mesh.face_count()) f = mesh.face_count() - 1;
    Vec3 a = mesh.vertices.col(mesh.faces(0, f));
    Vec3 b = mesh.vertices.col(mesh.faces(1, f));
    Vec3 c = mesh.vertices.col(mesh.faces(2, f));
    double r1 = std::sqrt(rng.uniform());
    double r2 = rng.uniform();
    out.points.col(s) = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
    Vec3 nrm = (b - a).cross(c - a);
    out.normals.col(s) = nrm / nrm.norm();
  }
  out.validate();
  return out;
}

MeshResult reconstruct_mesh(const LiftedEmbedding& emb, int chart_count, int res,
                            std::int64_t steps, std::uint64_t seed) {
  emb.validate();
  MeshResult result;
  result.charts = decompose_charts(emb.W(), chart_count, derive_seed(seed, "charts"));
  std::vector<TriangleMesh> parts;
  for (int c = 0; c < chart_count; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < emb.size(); ++i)
      if (result.charts.labels[i] == c) members.push_back(i);
    if (Eigen::Index(members.size()) < 16) {
      std::cerr << "warning: chart " << c << " has " << members.size()
                << " points; skipped\n";
      continue;
    }
    Mat3X target(3, members.size());
    for (std::size_t t = 0; t < members.size(); ++t)
      target.col(Eigen::Index(t)) = emb.X().col(members[t]);
    ChartSurface surf = fit_chart(target, c, steps, seed + std::uint64_t(c));
    parts.push_back(triangulate_chart(surf, res));
    result.surfaces.push_back(std::move(surf));
  }
  if (parts.empty()) throw validation_error("all charts were skipped");
  result.mesh = assemble_mesh(parts);
  OrientedPointSet samples =
      sample_mesh_surface(result.mesh, 10000, derive_seed(seed, "mesh-eval"));
  result.chamfer_to_points = chamfer(samples.points, Mat3X(emb.X()));
  return result;
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
  mesh.validate();
  std::ofstream f(path);
  if (!f) throw validation_error("cannot write " + path);
  for (Eigen::Index v = 0; v < mesh.vertices.cols(); ++v)
    f << "v " << format_double(mesh.vertices(0, v)) << ' '
      << format_double(mesh.vertices(1, v)) << ' '
      << format_double(mesh.vertices(2, v)) << '\n';
  std::map<int, std::vector<Eigen::Index>> by_chart;
  for (Eigen::Index t = 0; t < mesh.face_count(); ++t)
    by_chart[mesh.face_chart[t]].push_back(t);
  for (const auto& [chart, fids] : by_chart) {
    f << "usemtl chart_" << chart << '\n';
    for (Eigen::Index t : fids)
      f << "f " << mesh.faces(0, t) + 1 << ' ' << mesh.faces(1, t) + 1 << ' '
        << mesh.faces(2, t) + 1 << '\n';
  }
  if (!f) throw validation_error("write failed: " + path);
}

TriangleMesh read_obj(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw validation_error("cannot open " + path);
  std::vector<double> verts;
  std::vector<int> faces, face_chart;
  int chart = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    if (word == "v") {
      std::string a, b, c;
      if (!(ss >> a >> b >> c))
        throw validation_error(path + ": line " + std::to_string(lineno) +
                               ": bad vertex");
      verts.push_back(parse_double(a));
      verts.push_back(parse_double(b));
      verts.push_back(parse_double(c));
    } else if (word == "usemtl") {
      std::string name;
      ss >> name;
      if (name.rfind("chart_", 0) != 0)
        throw validation_error(path + ": line " + std::to_string(lineno) +
                               ": expected usemtl chart_<id>");
      chart = int(parse_double(name.substr(6)));
    } else if (word == "f") {
      int idx[3];
      for (int t = 0; t < 3; ++t) {
        if (!(ss >> idx[t]))
          throw validation_error(path + ": line " + std::to_string(lineno) +
                                 ": bad face");
        --idx[t];
      }
      faces.insert(faces.end(), idx, idx + 3);
      face_chart.push_back(chart);
    } else {
      throw validation_error(path + ": line " + std::to_string(lineno) +
                             ": unsupported OBJ element '" + word + "'");
    }
  }
  TriangleMesh mesh;
  Eigen::Index nv = Eigen::Index(verts.size() / 3);
  mesh.vertices = Eigen::Map<Mat3X>(verts.data(), 3, nv);
  Eigen::Index nf = Eigen::Index(faces.size() / 3);
  mesh.faces = Eigen::Map<Eigen::Matrix<int, 3, Eigen::Dynamic>>(faces.data(), 3, nf);
  mesh.face_chart = std::move(face_chart);
  mesh.validate();
  return mesh;
}

}  // namespace ghof
