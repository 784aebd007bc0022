#include "ghof/neighbor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "ghof/knn.hpp"

namespace ghof {

namespace {

std::vector<int> component_of(const NeighborGraph& g, int* out_count) {
  Eigen::Index n = g.size();
  std::vector<int> comp(n, -1);
  std::vector<Eigen::Index> stack;
  int c = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    stack.push_back(s);
    comp[s] = c;
    while (!stack.empty()) {
      Eigen::Index u = stack.back();
      stack.pop_back();
      for (const auto& e : g.adjacency[u])
        if (comp[e.to] == -1) {
          comp[e.to] = c;
          stack.push_back(e.to);
        }
    }
    ++c;
  }
  *out_count = c;
  return comp;
}

void insert_edge(NeighborGraph& g, Eigen::Index i, Eigen::Index j, double w) {
  auto& lst = g.adjacency[i];
  auto it = std::lower_bound(lst.begin(), lst.end(), j,
                             [](const NeighborGraph::Edge& e, Eigen::Index v) {
                               return e.to < v;
                             });
  if (it != lst.end() && it->to == j) return;
  lst.insert(it, {j, w});
}

}  // namespace

void NeighborGraph::validate() const {
  Eigen::Index n = size();
  if (Eigen::Index(adjacency.size()) != n)
    throw validation_error("adjacency size does not match vertex count");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& e : adjacency[i]) {
      if (e.to < 0 || e.to >= n || e.to == i)
        throw validation_error("bad edge endpoint");
      double d = (vertices.col(i) - vertices.col(e.to)).norm();
      if (!(e.w > 0.0) || std::abs(e.w - d) > 1e-9 * std::max(1.0, d))
        throw validation_error("edge weight is not the Euclidean length");
      const auto& back = adjacency[e.to];
      auto it = std::lower_bound(back.begin(), back.end(), i,
                                 [](const Edge& b, Eigen::Index v) { return b.to < v; });
      if (it == back.end() || it->to != i || it->w != e.w)
        throw validation_error("adjacency is not symmetric");
    }
  }
}

NeighborGraph build_graph(const PointCloud& cloud, int k, int* bridges_added) {
  Eigen::Index n = cloud.size();
  if (n < 2 || k >= n) throw validation_error("build_graph requires k < n and n >= 2");
  NeighborGraph g;
  g.vertices = cloud.points;
  g.adjacency.assign(n, {});
  auto nbrs = knn(cloud.points, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j : nbrs[i]) {
      Eigen::Index a = std::min(i, j), b = std::max(i, j);
      double w = (g.vertices.col(a) - g.vertices.col(b)).norm();
      insert_edge(g, a, b, w);
      insert_edge(g, b, a, w);
    }
  int before = count_components(g);
  connect_components(g);
  if (bridges_added) *bridges_added = before - 1;
  return g;
}

int count_components(const NeighborGraph& graph) {
  int c = 0;
  component_of(graph, &c);
  return c;
}

void connect_components(NeighborGraph& graph) {
  Eigen::Index n = graph.size();
  for (;;) {
    int c = 0;
    std::vector<int> comp = component_of(graph, &c);
    if (c <= 1) return;
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (comp[i] == comp[j]) continue;
        double d2 = (graph.vertices.col(i) - graph.vertices.col(j)).squaredNorm();
        if (d2 < best) {
          best = d2;
          bi = i;
          bj = j;
        }
      }
    double w = std::sqrt(best);
    insert_edge(graph, bi, bj, w);
    insert_edge(graph, bj, bi, w);
    std::cerr << "warning: bridging disconnected components with edge " << bi << "-"
              << bj << " (length " << w << ")\n";
  }
}

double mean_edge_length(const NeighborGraph& graph) {
  double sum = 0.0;
  std::size_t cnt = 0;
  for (Eigen::Index i = 0; i < graph.size(); ++i)
    for (const auto& e : graph.adjacency[i])
      if (e.to > i) {
        sum += e.w;
        ++cnt;
      }
  if (cnt == 0) throw validation_error("graph has no edges");
  return sum / double(cnt);
}

}  // namespace ghof
