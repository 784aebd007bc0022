#pragma once

#include <string>

#include "ghof/neighbor_graph.hpp"

namespace ghof {

// All-pairs shortest-path distances over a NeighborGraph, in object units.
struct GeodesicMatrix {
  MatX distances;  // n x n, symmetric, zero diagonal

  Eigen::Index size() const { return distances.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return distances(i, j); }

  // Symmetry (1e-5), zero diagonal (1e-6), nonnegative finite entries.
  void validate() const;
};

// Exact single-source shortest paths. Requires a connected graph (guaranteed
// by build_graph); unreachable vertices raise numerical_error.
VecX dijkstra_from(const NeighborGraph& graph, Eigen::Index source);

// Row i is dijkstra_from(graph, i); rows with the larger source index are
// mirrored from the smaller one so the matrix is symmetric bit for bit.
GeodesicMatrix all_pairs_geodesics(const NeighborGraph& graph);

// Binary format: magic "GHOF-DM1", u64 little-endian n, n^2 float32
// little-endian values row-major.
void save_geodesic_matrix(const std::string& path, const GeodesicMatrix& D);
GeodesicMatrix load_geodesic_matrix(const std::string& path);

}  // namespace ghof
