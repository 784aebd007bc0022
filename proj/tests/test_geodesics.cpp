#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include <doctest.h>

#include "ghof/geodesics.hpp"
#include "ghof/neighbor_graph.hpp"
#include "ghof/rng.hpp"
#include "ghof/shapes.hpp"

using namespace ghof;

namespace {

PointCloud cloud_from(std::initializer_list<Vec3> pts) {
  PointCloud c;
  c.points.resize(3, Eigen::Index(pts.size()));
  Eigen::Index i = 0;
  for (const Vec3& p : pts) c.points.col(i++) = p;
  return c;
}

NeighborGraph path_graph(int n) {
  PointCloud c;
  c.points.resize(3, n);
  for (int i = 0; i < n; ++i) c.points.col(i) = Vec3(double(i), 0, 0);
  return build_graph(c, 1);
}

// Bellman-Ford oracle over the same graph.
VecX bellman_ford(const NeighborGraph& g, Eigen::Index src) {
  Eigen::Index n = g.size();
  VecX d = VecX::Constant(n, std::numeric_limits<double>::infinity());
  d[src] = 0.0;
  for (Eigen::Index it = 0; it < n; ++it)
    for (Eigen::Index u = 0; u < n; ++u)
      for (const auto& e : g.adjacency[size_t(u)])
        d[e.to] = std::min(d[e.to], d[u] + e.w);
  return d;
}

std::string scratch(const std::string& name) {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "ghof_test_geodesics";
  fs::create_directories(p);
  return (p / name).string();
}

}  // namespace

TEST_CASE("build_graph on a unit square with k=2") {
  PointCloud c = cloud_from({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  NeighborGraph g = build_graph(c, 2);
  g.validate();
  for (Eigen::Index i = 0; i < 4; ++i) {
    REQUIRE(g.adjacency[size_t(i)].size() == 2);
    for (const auto& e : g.adjacency[size_t(i)]) {
      CHECK(e.w == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((c.points.col(i) - c.points.col(e.to)).norm() == doctest::Approx(e.w));
    }
  }
}

TEST_CASE("build_graph k = n-1 gives a complete graph; bad k throws") {
  PointCloud c = cloud_from({{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {0, 0, 3}, {1, 1, 1}});
  NeighborGraph g = build_graph(c, 4);
  g.validate();
  for (const auto& adj : g.adjacency) CHECK(adj.size() == 4);
  CHECK_THROWS_AS(build_graph(c, 5), validation_error);
}

TEST_CASE("bridging connects distant clusters") {
  PointCloud c = cloud_from({{0, 0, 0},
                             {0.1, 0, 0},
                             {0, 0.1, 0},
                             {5, 0, 0},
                             {5.1, 0, 0},
                             {5, 0.1, 0}});
  int bridges = -1;
  NeighborGraph g = build_graph(c, 1, &bridges);
  g.validate();
  CHECK(count_components(g) == 1);
  CHECK(bridges >= 1);

  // The bridge must be the globally closest inter-cluster pair (0.1,0)-(5,0),
  // weight 4.9.
  bool found = false;
  for (const auto& e : g.adjacency[1])
    if (e.to == 3) {
      found = true;
      CHECK(e.w == doctest::Approx(4.9).epsilon(1e-12));
    }
  CHECK(found);
}

TEST_CASE("three distant clusters need exactly two bridges") {
  PointCloud c = cloud_from({{0, 0, 0},
                             {0.1, 0, 0},
                             {10, 0, 0},
                             {10.1, 0, 0},
                             {0, 10, 0},
                             {0.1, 10, 0}});
  int bridges = -1;
  NeighborGraph g = build_graph(c, 1, &bridges);
  CHECK(bridges == 2);
  CHECK(count_components(g) == 1);
}

TEST_CASE("connect_components leaves connected graphs unchanged") {
  PointCloud c = cloud_from({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  NeighborGraph g = build_graph(c, 2);
  auto before = g.adjacency;
  connect_components(g);
  CHECK(g.adjacency.size() == before.size());
  for (size_t i = 0; i < before.size(); ++i)
    CHECK(g.adjacency[i].size() == before[i].size());
}

TEST_CASE("dijkstra on the unit path graph") {
  NeighborGraph g = path_graph(3);
  VecX d = dijkstra_from(g, 0);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dijkstra_from(g, 1)[1] == 0.0);
}

TEST_CASE("dijkstra agrees with Bellman-Ford on random graphs") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Index n = 40;
    PointCloud c;
    c.points.resize(3, n);
    for (Eigen::Index i = 0; i < n; ++i)
      c.points.col(i) = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    NeighborGraph g = build_graph(c, 3);
    for (Eigen::Index s = 0; s < n; s += 7) {
      VecX dj = dijkstra_from(g, s);
      VecX bf = bellman_ford(g, s);
      CHECK((dj - bf).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("complete metric graph: shortest path is the direct edge") {
  Rng rng(32);
  Eigen::Index n = 7;
  PointCloud c;
  c.points.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i)
    c.points.col(i) = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  NeighborGraph g = build_graph(c, int(n) - 1);
  for (Eigen::Index s = 0; s < n; ++s) {
    VecX d = dijkstra_from(g, s);
    for (Eigen::Index t = 0; t < n; ++t)
      if (t != s)
        CHECK(d[t] == doctest::Approx((c.points.col(s) - c.points.col(t)).norm())
                          .epsilon(1e-12));
  }
}

TEST_CASE("dijkstra is independent of adjacency insertion order") {
  PointCloud c = cloud_from(
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 1}, {2, 1, 0}});
  NeighborGraph g = build_graph(c, 3);
  NeighborGraph rev = g;
  for (auto& adj : rev.adjacency) std::reverse(adj.begin(), adj.end());
  for (Eigen::Index s = 0; s < g.size(); ++s) {
    VecX a = dijkstra_from(g, s);
    VecX b = dijkstra_from(rev, s);
    CHECK(a == b);
  }
}

TEST_CASE("all_pairs matches the path-graph hand example and is symmetric") {
  NeighborGraph g = path_graph(3);
  GeodesicMatrix D = all_pairs_geodesics(g);
  D.validate();
  MatX expect(3, 3);
  expect << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  CHECK((D.distances - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(D.distances == D.distances.transpose().eval());
}

TEST_CASE("geodesic matrix invariants on a random surface sampling") {
  ShapeParams p;
  PointCloud c = gen_shape(ShapeKind::torus, p, 300, 21);
  NeighborGraph g = build_graph(c, 6);
  GeodesicMatrix D = all_pairs_geodesics(g);
  D.validate();
  CHECK(D.distances == D.distances.transpose().eval());
  for (Eigen::Index i = 0; i < D.size(); ++i) CHECK(D(i, i) == 0.0);

  Rng rng(77);
  for (int t = 0; t < 10000; ++t) {
    auto i = Eigen::Index(rng.uniform_index(300));
    auto j = Eigen::Index(rng.uniform_index(300));
    auto k = Eigen::Index(rng.uniform_index(300));
    // Path concatenation is a valid path, up to fp addition slack.
    CHECK(D(i, j) <= D(i, k) + D(k, j) + 1e-12);
    CHECK(D(i, j) + 1e-12 >= (c.points.col(i) - c.points.col(j)).norm());
  }
}

TEST_CASE("distance matrix file round-trips bit-exactly") {
  NeighborGraph g = path_graph(5);
  GeodesicMatrix D = all_pairs_geodesics(g);
  std::string p1 = scratch("d1.dm1"), p2 = scratch("d2.dm1");
  save_geodesic_matrix(p1, D);
  GeodesicMatrix L = load_geodesic_matrix(p1);
  save_geodesic_matrix(p2, L);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  CHECK(L.distances == D.distances.cast<float>().cast<double>());
}

TEST_CASE("distance matrix loader rejects malformed files") {
  std::string p = scratch("bad.dm1");
  {
    std::ofstream f(p, std::ios::binary);
    f << "NOTMAGIC";
  }
  CHECK_THROWS_AS(load_geodesic_matrix(p), validation_error);
  {
    std::ofstream f(p, std::ios::binary);
    f << "GHOF-DM1";
    std::uint64_t n = 3;
    f.write(reinterpret_cast<const char*>(&n), 8);
    float v = 1.0f;
    f.write(reinterpret_cast<const char*>(&v), 4);  // truncated payload
  }
  CHECK_THROWS_AS(load_geodesic_matrix(p), validation_error);
  CHECK_THROWS_AS(load_geodesic_matrix(scratch("missing.dm1")), validation_error);
}

TEST_CASE("analytic sphere geodesics") {
  ShapeParams p;
  Vec3 a(1, 0, 0), b(-1, 0, 0), c(0, 1, 0);
  CHECK(analytic_geodesic(ShapeKind::sphere, p, a, a) == doctest::Approx(0.0));
  CHECK(analytic_geodesic(ShapeKind::sphere, p, a, b) ==
        doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(analytic_geodesic(ShapeKind::sphere, p, a, c) ==
        doctest::Approx(M_PI / 2).epsilon(1e-12));
  ShapeParams p2;
  p2.radius = 2.0;
  CHECK(analytic_geodesic(ShapeKind::sphere, p2, Vec3(2, 0, 0), Vec3(0, 2, 0)) ==
        doctest::Approx(M_PI).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_geodesic(ShapeKind::sphere, p, Vec3(2, 0, 0), a),
                  validation_error);
}

TEST_CASE("analytic band geodesic matches dense-graph Dijkstra") {
  ShapeParams p;  // radius 1, height 1, removed arc pi/2
  PointCloud c = gen_shape(ShapeKind::cut_cylinder_band, p, 4000, 55);
  NeighborGraph g = build_graph(c, 10);
  GeodesicMatrix D = all_pairs_geodesics(g);
  Rng rng(56);
  double worst = 0.0, sum = 0.0;
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    auto i = Eigen::Index(rng.uniform_index(4000));
    auto j = Eigen::Index(rng.uniform_index(4000));
    double truth =
        analytic_geodesic(ShapeKind::cut_cylinder_band, p, c.points.col(i), c.points.col(j));
    if (truth < 0.3) continue;
    ++checked;
    double rel = std::abs(D(i, j) - truth) / truth;
    sum += rel;
    worst = std::max(worst, rel);
  }
  CHECK(checked > 50);
  // Graph paths zigzag between samples, so they overshoot the true geodesic
  // by a few percent in the bulk with a heavier short-range tail.
  CHECK(sum / checked < 0.06);
  CHECK(worst < 0.25);
}

TEST_CASE("analytic plate geodesics: same face, cross edge, top-bottom") {
  ShapeParams p;  // size 1, thickness 0.02
  double h = 0.01;

  // Same face: plain Euclidean distance.
  Vec3 a(0.1, 0.1, h), b(-0.2, 0.3, h);
  CHECK(analytic_geodesic(ShapeKind::thin_plate, p, a, b) ==
        doctest::Approx((a - b).head<2>().norm()).epsilon(1e-12));

  // Top to bottom directly across the nearest edge: unroll over x = 0.5.
  Vec3 t(0.4, 0.0, h), u(0.4, 0.0, -h);
  double expect = (0.5 - 0.4) + 0.02 + (0.5 - 0.4);
  CHECK(analytic_geodesic(ShapeKind::thin_plate, p, t, u) ==
        doctest::Approx(expect).epsilon(1e-9));

  // Face to side point.
  Vec3 s(0.5, 0.0, 0.0);
  CHECK(analytic_geodesic(ShapeKind::thin_plate, p, t, s) ==
        doctest::Approx(0.1 + 0.01).epsilon(1e-9));

  // Side-to-side pairs are out of scope.
  Vec3 s2(0.0, 0.5, 0.0);
  CHECK_THROWS_AS(analytic_geodesic(ShapeKind::thin_plate, p, s, s2), validation_error);
}

TEST_CASE("plate geodesic agrees with a dense graph when sampling resolves the gap") {
  // A quarter-size plate at n=4000 puts the 10-NN radius well under the
  // 0.02 face gap, so no k-NN edge crosses between top and bottom.
  ShapeParams p;
  p.size = 0.25;
  PointCloud c = gen_shape(ShapeKind::thin_plate, p, 4000, 58);
  NeighborGraph g = build_graph(c, 10);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    for (const auto& e : g.adjacency[i])
      CHECK(c.labels[i] + c.labels[e.to] != 1);  // labels: 0 top, 1 bottom, 2 side
  GeodesicMatrix D = all_pairs_geodesics(g);
  Rng rng(59);
  double worst = 0.0, sum = 0.0;
  int checked = 0;
  for (int t = 0; t < 2000 && checked < 120; ++t) {
    auto i = Eigen::Index(rng.uniform_index(4000));
    auto j = Eigen::Index(rng.uniform_index(4000));
    double truth;
    try {
      truth = analytic_geodesic(ShapeKind::thin_plate, p, c.points.col(i), c.points.col(j));
    } catch (const validation_error&) {
      continue;  // side-to-side pair
    }
    if (truth < 0.3 * p.size) continue;
    ++checked;
    double rel = std::abs(D(i, j) - truth) / truth;
    sum += rel;
    worst = std::max(worst, rel);
  }
  CHECK(checked > 60);
  CHECK(sum / checked < 0.06);
  CHECK(worst < 0.25);
}

TEST_CASE("plate graph short-circuits across the gap at coarse sampling") {
  // Default size 1 at n=4000 leaves the 8-NN radius above the face gap, so
  // the graph tunnels and top-bottom distances collapse toward Euclidean.
  ShapeParams p;
  PointCloud c = gen_shape(ShapeKind::thin_plate, p, 4000, 60);
  NeighborGraph g = build_graph(c, 8);
  GeodesicMatrix D = all_pairs_geodesics(g);
  Rng rng(61);
  int tunneled = 0, checked = 0;
  for (int t = 0; t < 20000 && checked < 150; ++t) {
    auto i = Eigen::Index(rng.uniform_index(4000));
    auto j = Eigen::Index(rng.uniform_index(4000));
    if (!(c.labels[i] == 0 && c.labels[j] == 1)) continue;
    if (std::abs(c.points(0, i)) > 0.3 || std::abs(c.points(1, i)) > 0.3) continue;
    if (std::abs(c.points(0, j)) > 0.3 || std::abs(c.points(1, j)) > 0.3) continue;
    double truth = analytic_geodesic(ShapeKind::thin_plate, p, c.points.col(i), c.points.col(j));
    if (truth < 0.5) continue;
    ++checked;
    if (D(i, j) < 0.75 * truth) ++tunneled;
  }
  CHECK(checked == 150);
  CHECK(double(tunneled) / checked >= 0.8);
}

TEST_CASE("unsupported analytic kinds throw") {
  ShapeParams p;
  CHECK_THROWS_AS(analytic_geodesic(ShapeKind::torus, p, Vec3(0.5, 0, 0), Vec3(0, 0.5, 0)),
                  validation_error);
}
