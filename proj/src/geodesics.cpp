#include "ghof/geodesics.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <vector>

#include "ghof/parallel.hpp"

namespace ghof {

void GeodesicMatrix::validate() const {
  Eigen::Index n = size();
  if (distances.cols() != n) throw validation_error("geodesic matrix is not square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(distances(i, i)) > 1e-6)
      throw validation_error("geodesic matrix diagonal is not zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = distances(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw validation_error("geodesic matrix has a bad entry");
      if (std::abs(v - distances(j, i)) > 1e-5)
        throw validation_error("geodesic matrix is not symmetric");
    }
  }
}

VecX dijkstra_from(const NeighborGraph& graph, Eigen::Index source) {
  Eigen::Index n = graph.size();
  if (source < 0 || source >= n) throw validation_error("dijkstra source out of range");
  VecX dist = VecX::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  using Item = std::pair<double, Eigen::Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const auto& e : graph.adjacency[u]) {
      double nd = d + e.w;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        heap.emplace(nd, e.to);
      }
    }
  }
  if (!dist.allFinite())
    throw numerical_error("graph is disconnected; dijkstra found unreachable vertices");
  return dist;
}

GeodesicMatrix all_pairs_geodesics(const NeighborGraph& graph) {
  Eigen::Index n = graph.size();
  GeodesicMatrix D;
  D.distances.resize(n, n);
  parallel_for(n, 16, [&](Eigen::Index b, Eigen::Index e) {
    for (Eigen::Index i = b; i < e; ++i) D.distances.row(i) = dijkstra_from(graph, i);
  });
  // Shortest-path sums of the same edge weights can round differently in the
  // two directions; mirroring the lower source index makes symmetry exact.
  for (Eigen::Index i = 0; i < n; ++i) {
    D.distances(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) D.distances(j, i) = D.distances(i, j);
  }
  return D;
}

void save_geodesic_matrix(const std::string& path, const GeodesicMatrix& D) {
  D.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot write " + path);
  f.write("GHOF-DM1", 8);
  std::uint64_t n = std::uint64_t(D.size());
  f.write(reinterpret_cast<const char*>(&n), 8);
  std::vector<float> row(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) row[j] = float(D.distances(i, j));
    f.write(reinterpret_cast<const char*>(row.data()), std::streamsize(4 * n));
  }
  if (!f) throw validation_error("write failed: " + path);
}

GeodesicMatrix load_geodesic_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot open " + path);
  char magic[8];
  if (!f.read(magic, 8) || std::memcmp(magic, "GHOF-DM1", 8) != 0)
    throw validation_error(path + ": bad magic, expected GHOF-DM1");
  std::uint64_t n = 0;
  if (!f.read(reinterpret_cast<char*>(&n), 8) || n == 0)
    throw validation_error(path + ": bad vertex count");
  GeodesicMatrix D;
  D.distances.resize(Eigen::Index(n), Eigen::Index(n));
  std::vector<float> row(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!f.read(reinterpret_cast<char*>(row.data()), std::streamsize(4 * n)))
      throw validation_error(path + ": truncated distance data");
    for (std::uint64_t j = 0; j < n; ++j) D.distances(Eigen::Index(i), Eigen::Index(j)) = row[j];
  }
  D.validate();
  return D;
}

}  // namespace ghof
