#pragma once

#include <string>
#include <vector>

#include "ghof/mlp.hpp"
#include "ghof/surface_analysis.hpp"

namespace ghof {

// Explicit chart mapping f: unit square -> R^3, fitted by Chamfer against the
// chart's own predicted points (never external ground truth).
struct ChartSurface {
  int chart_id = 0;
  Mlp uv_net;  // default 2 -> 64 -> 64 -> 3, tanh hidden
  std::vector<double> fit_trace;  // Chamfer per step
};

struct TriangleMesh {
  Mat3X vertices;
  Eigen::Matrix<int, 3, Eigen::Dynamic> faces;
  std::vector<int> face_chart;  // one chart id per face

  Eigen::Index face_count() const { return faces.cols(); }
  void validate() const;
};

// Adam (lr 1e-3) on a fresh uniform UV batch per step; the trace records the
// batch Chamfer before each update.
ChartSurface fit_chart(const Mat3X& target, int chart_id, std::int64_t steps,
                       std::uint64_t seed);

// Evaluates uv_net on a res x res grid over the unit square; 2(res-1)^2
// faces with consistent winding. Degenerate faces are kept here and dropped
// at assembly.
TriangleMesh triangulate_chart(const ChartSurface& surface, int res);

// Concatenates charts, reindexes faces, drops zero-area faces.
TriangleMesh assemble_mesh(const std::vector<TriangleMesh>& charts);

// Area-weighted face selection, uniform barycentric placement; normals are
// unit face normals.
OrientedPointSet sample_mesh_surface(const TriangleMesh& mesh, Eigen::Index n,
                                     std::uint64_t seed);

struct MeshResult {
  TriangleMesh mesh;
  ChartAssignment charts;
  std::vector<ChartSurface> surfaces;  // fitted charts, skipped ones absent
  double chamfer_to_points = 0.0;      // sampled mesh vs embedding points
};

// decompose_charts on W -> fit_chart per chart (seed + chart_id) ->
// triangulate -> assemble. Charts with fewer than 16 points are skipped with
// a warning.
MeshResult reconstruct_mesh(const LiftedEmbedding& emb, int chart_count, int res,
                            std::int64_t steps, std::uint64_t seed);

// Wavefront OBJ: all v lines, then per chart (ascending id) one
// "usemtl chart_<id>" line followed by its f lines (1-based indices).
void write_obj(const std::string& path, const TriangleMesh& mesh);
TriangleMesh read_obj(const std::string& path);

}  // namespace ghof
