#pragma once

#include <vector>

#include "ghof/point_cloud.hpp"

namespace ghof {

// Symmetric k-NN graph over surface samples. Weights are Euclidean edge
// lengths; adjacency lists are sorted by neighbor index.
struct NeighborGraph {
  struct Edge {
    Eigen::Index to;
    double w;
  };

  Mat3X vertices;  // 3 x n
  std::vector<std::vector<Edge>> adjacency;

  Eigen::Index size() const { return vertices.cols(); }
  void validate() const;
};

// Union-symmetrized k-NN graph, bridged to a single component. If
// bridges_added is non-null it receives the number of bridge edges inserted.
NeighborGraph build_graph(const PointCloud& cloud, int k, int* bridges_added = nullptr);

// Adds c-1 bridge edges between the c components, each the globally shortest
// inter-component point pair (greedy merge of closest components). Emits one
// warning line per bridge on stderr.
void connect_components(NeighborGraph& graph);

int count_components(const NeighborGraph& graph);

// Mean Euclidean length over undirected edges; the default RBF bandwidth is
// 1/h^2 with h this value.
double mean_edge_length(const NeighborGraph& graph);

}  // namespace ghof
