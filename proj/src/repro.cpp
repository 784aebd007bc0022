#include "ghof/repro.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ghof/chart_mesh.hpp"
#include "ghof/cloud_io.hpp"
#include "ghof/commands.hpp"
#include "ghof/embedding.hpp"
#include "ghof/geodesics.hpp"
#include "ghof/knn.hpp"
#include "ghof/losses.hpp"
#include "ghof/mlp.hpp"
#include "ghof/neighbor_graph.hpp"
#include "ghof/parallel.hpp"
#include "ghof/rng.hpp"
#include "ghof/shapes.hpp"
#include "ghof/soft_geodesic.hpp"
#include "ghof/surface_analysis.hpp"
#include "ghof/training.hpp"

namespace ghof::repro {

namespace {

// Pinned seeds, one per criterion.
constexpr std::uint64_t kSeedSphereOracle = 11;
constexpr std::uint64_t kSeedSoftExact = 12;
constexpr std::uint64_t kSeedGradients = 13;
constexpr std::uint64_t kSeedPythagoras = 14;
constexpr std::uint64_t kSeedCutFit = 15;
constexpr std::uint64_t kSeedThinPlate = 16;
constexpr std::uint64_t kSeedCubeCharts = 17;
constexpr std::uint64_t kSeedMeshPipeline = 18;
constexpr std::uint64_t kSeedDeterminism = 19;

// Pinned tolerances and budgets.
constexpr double kOracleRelTol = 0.05;       // criterion 1
constexpr double kOracleMinTrue = 0.2;
constexpr double kSoftExactTol = 1e-12;      // criterion 2
constexpr double kAlphaSumTol = 1e-9;
constexpr double kGradRelTol = 1e-4;         // criterion 3
constexpr double kGradFdStep = 1e-5;
constexpr double kIdentityRelTol = 1e-9;     // criterion 4
constexpr double kCutChamferMax = 0.3;       // criterion 5, paper units
constexpr double kCutMreMax = 0.10;
constexpr double kAblationFactor = 1.5;
constexpr double kPlateInteriorHalf = 0.35;  // criterion 6 interior box
constexpr double kPlateFraction = 0.95;
constexpr int kPlateNormalK = 16;
constexpr double kPurityMin = 0.90;          // criterion 7
constexpr double kMeshChamferMax = 5e-3;     // criterion 8, raw squared units

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

std::string scratch_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const char* root = std::getenv("GHOF_OUT_ROOT");
  fs::path p = (root && *root) ? fs::path(root) : fs::path("runs");
  p = p / "repro" / name;
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

SoftGeodesicContext make_ctx(const NeighborGraph& graph, const GeodesicMatrix& D,
                             const TrainingConfig& tc) {
  SoftGeodesicContext ctx;
  ctx.graph = &graph;
  ctx.D = &D;
  ctx.k_lambda = tc.k_lambda;
  ctx.bandwidth = tc.bandwidth > 0.0 ? tc.bandwidth : default_bandwidth(graph);
  return ctx;
}

Mat3X gather3(const Mat3X& X, const std::vector<Eigen::Index>& idx) {
  Mat3X out(3, Eigen::Index(idx.size()));
  for (std::size_t t = 0; t < idx.size(); ++t) out.col(Eigen::Index(t)) = X.col(idx[t]);
  return out;
}

std::vector<int> nearest_labels(const Mat3X& X, const PointCloud& cloud) {
  std::vector<int> ref(std::size_t(X.cols()));
  parallel_for(X.cols(), 256, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i)
      ref[std::size_t(i)] = cloud.labels[std::size_t(nearest(cloud.points, X.col(i)).first)];
  });
  return ref;
}

// Both normal-estimation modes over every embedding point (same k).
void pred_normals(const LiftedEmbedding& emb, int k, Mat3X* n_euc, Mat3X* n_geo) {
  const Mat3X X = emb.X();
  Eigen::Index m = X.cols();
  n_euc->resize(3, m);
  n_geo->resize(3, m);
  parallel_for(m, 128, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      n_euc->col(i) = estimate_normal(gather3(X, euclidean_neighborhood(X, i, k)));
      n_geo->col(i) = estimate_normal(gather3(X, geodesic_neighborhood(emb, i, k)));
    }
  });
}

// Mean |ghat - g| / g over held-out embedding pairs, g taken from the
// Dijkstra matrix at the nearest ground-truth vertices, keeping pairs with
// g > 0.1 until `want` of them are collected.
double held_out_mre(const LiftedEmbedding& emb, const PointCloud& cloud,
                    const GeodesicMatrix& D, std::int64_t want, std::uint64_t seed) {
  Eigen::Index m = emb.size();
  Mat3X X = emb.X();
  std::vector<Eigen::Index> snap(static_cast<std::size_t>(m));
  parallel_for(m, 256, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i)
      snap[std::size_t(i)] = nearest(cloud.points, X.col(i)).first;
  });
  Rng rng(seed);
  double sum = 0.0;
  std::int64_t used = 0, attempts = 0, cap = want * 1000;
  while (used < want && attempts < cap) {
    ++attempts;
    auto a = Eigen::Index(rng.uniform_index(std::uint64_t(m)));
    auto b = Eigen::Index(rng.uniform_index(std::uint64_t(m)));
    if (a == b) continue;
    double g = D(snap[std::size_t(a)], snap[std::size_t(b)]);
    if (!(g > 0.1)) continue;
    sum += std::abs(emb.ghat(a, b) - g) / g;
    ++used;
  }
  if (used < want) throw numerical_error("could not collect enough held-out pairs");
  return sum / double(used);
}

struct FittedShape {
  PointCloud cloud;
  NeighborGraph graph;
  GeodesicMatrix D;
  TrainResult result;
};

FittedShape fit_pipeline(ShapeKind kind, const ShapeParams& sp, Eigen::Index n,
                         int k_graph, const TrainingConfig& tc) {
  FittedShape fs;
  fs.cloud = normalize_to_unit_box(gen_shape(kind, sp, n, tc.seed)).first;
  fs.graph = build_graph(fs.cloud, k_graph);
  fs.D = all_pairs_geodesics(fs.graph);
  SoftGeodesicContext ctx = make_ctx(fs.graph, fs.D, tc);
  fs.result = fit_object(fs.cloud, ctx, tc);
  return fs;
}

// ---------------------------------------------------------------------------
// Criterion 1: Dijkstra on the sphere k-NN graph vs the analytic great-circle
// distance, rel error < 5% wherever the true distance exceeds 0.2.
CriterionResult c_sphere_oracle() {
  CriterionResult r;
  ShapeParams sp;
  PointCloud cloud = gen_shape(ShapeKind::sphere, sp, 2000, kSeedSphereOracle);
  NeighborGraph graph = build_graph(cloud, 8);
  GeodesicMatrix D = all_pairs_geodesics(graph);
  Eigen::Index n = cloud.size();
  double worst = 0.0, sum = 0.0;
  std::int64_t checked = 0, over = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double truth =
          analytic_geodesic(ShapeKind::sphere, sp, cloud.points.col(i), cloud.points.col(j));
      if (truth <= kOracleMinTrue) continue;
      ++checked;
      double rel = std::abs(D(i, j) - truth) / truth;
      sum += rel;
      worst = std::max(worst, rel);
      if (rel >= kOracleRelTol) ++over;
    }
  r.pass = worst < kOracleRelTol;
  r.details = fmt(
      "max rel err %.4f (tol %.2f) over %lld pairs with true > %.1f; mean %.4f, "
      "frac over tol %.4f",
      worst, kOracleRelTol, (long long)checked, kOracleMinTrue, sum / double(checked),
      double(over) / double(checked));
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 2: k_lambda=1 queries placed exactly on graph vertices reproduce
// D entries; confidence grids stay normalized for queries 1e3 units away.
CriterionResult c_soft_exact() {
  CriterionResult r;
  ShapeParams sp;
  PointCloud cloud = gen_shape(ShapeKind::sphere, sp, 500, kSeedSoftExact);
  NeighborGraph graph = build_graph(cloud, 8);
  GeodesicMatrix D = all_pairs_geodesics(graph);

  SoftGeodesicContext exact;
  exact.graph = &graph;
  exact.D = &D;
  exact.k_lambda = 1;
  exact.bandwidth = default_bandwidth(graph);

  Rng rng(derive_seed(kSeedSoftExact, "pairs"));
  Eigen::Index n = cloud.size();
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    auto a = Eigen::Index(rng.uniform_index(std::uint64_t(n)));
    auto b = Eigen::Index(rng.uniform_index(std::uint64_t(n)));
    double g = soft_geodesic(exact, cloud.points.col(a), cloud.points.col(b));
    worst = std::max(worst, std::abs(g - D(a, b)));
  }

  SoftGeodesicContext wide = exact;
  wide.k_lambda = 4;
  double worst_alpha = 0.0;
  bool finite = true;
  for (int t = 0; t < 20; ++t) {
    Vec3 q1 = 1e3 * rng.unit_vector();
    Vec3 q2 = 1e3 * rng.unit_vector();
    PathConfidences pc = path_confidences(wide, q1, q2);
    if (!pc.alpha.allFinite()) finite = false;
    worst_alpha = std::max(worst_alpha, std::abs(pc.alpha.sum() - 1.0));
  }
  r.pass = worst <= kSoftExactTol && worst_alpha <= kAlphaSumTol && finite;
  r.details = fmt("max |soft-D| %.3g (tol %.0e); far-query |sum(alpha)-1| %.3g (tol %.0e)%s",
                  worst, kSoftExactTol, worst_alpha, kAlphaSumTol,
                  finite ? "" : "; NON-FINITE alpha");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: analytic gradients vs central finite differences.
double rel_vec_err(const VecX& a, const VecX& b) {
  double den = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / den;
}

CriterionResult c_gradients() {
  CriterionResult r;
  double worst_chamfer = 0.0, worst_geo = 0.0, worst_bwd = 0.0;

  {
    Rng rng(derive_seed(kSeedGradients, "chamfer"));
    for (int inst = 0; inst < 100; ++inst) {
      Eigen::Index n = 4 + inst % 5, m = 5 + inst % 4;
      Mat3X X(3, n), Y(3, m);
      for (Eigen::Index c = 0; c < n; ++c)
        for (int d = 0; d < 3; ++d) X(d, c) = rng.uniform(-1.0, 1.0);
      for (Eigen::Index c = 0; c < m; ++c)
        for (int d = 0; d < 3; ++d) Y(d, c) = rng.uniform(-1.0, 1.0);
      Mat3X an = chamfer_grad(X, Y);
      Mat3X fd(3, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (int d = 0; d < 3; ++d) {
          double orig = X(d, c);
          X(d, c) = orig + kGradFdStep;
          double fp = chamfer(X, Y);
          X(d, c) = orig - kGradFdStep;
          double fm = chamfer(X, Y);
          X(d, c) = orig;
          fd(d, c) = (fp - fm) / (2.0 * kGradFdStep);
        }
      worst_chamfer = std::max(
          worst_chamfer, rel_vec_err(VecX(an.reshaped()), VecX(fd.reshaped())));
    }
  }

  {
    Rng rng(derive_seed(kSeedGradients, "geodesic"));
    for (int inst = 0; inst < 100; ++inst) {
      Eigen::Index dim = 4 + inst % 3, n = 6;
      MatX Z(dim, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index d = 0; d < dim; ++d) Z(d, c) = rng.uniform(-1.0, 1.0);
      std::vector<PairTarget> targets;
      for (int t = 0; t < 12; ++t) {
        auto i = Eigen::Index(rng.uniform_index(std::uint64_t(n)));
        auto j = Eigen::Index(rng.uniform_index(std::uint64_t(n)));
        if (i == j) continue;
        targets.push_back({i, j, rng.uniform(0.1, 2.0)});
      }
      MatX an = geodesic_loss_grad(Z, targets);
      MatX fd(dim, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index d = 0; d < dim; ++d) {
          double orig = Z(d, c);
          Z(d, c) = orig + kGradFdStep;
          double fp = geodesic_loss(Z, targets);
          Z(d, c) = orig - kGradFdStep;
          double fm = geodesic_loss(Z, targets);
          Z(d, c) = orig;
          fd(d, c) = (fp - fm) / (2.0 * kGradFdStep);
        }
      worst_geo =
          std::max(worst_geo, rel_vec_err(VecX(an.reshaped()), VecX(fd.reshaped())));
    }
  }

  {
    Rng rng(derive_seed(kSeedGradients, "backward"));
    for (int inst = 0; inst < 100; ++inst) {
      std::vector<int> sizes = {3, 6, 5, 3 + inst % 3};
      Activation act = (inst % 2) ? Activation::tanh : Activation::leaky_relu;
      Mlp net = init_network<double>(sizes, act, rng.next_u64());
      Eigen::Index batch = 3;
      MatX input(3, batch), target(sizes.back(), batch);
      for (Eigen::Index c = 0; c < batch; ++c) {
        for (int d = 0; d < 3; ++d) input(d, c) = rng.uniform(-1.0, 1.0);
        for (int d = 0; d < sizes.back(); ++d) target(d, c) = rng.uniform(-1.0, 1.0);
      }
      auto loss = [&]() {
        MlpWorkspace<double> w;
        const MatX& y = forward(net, input, w);
        return 0.5 * (y - target).squaredNorm();
      };
      MlpWorkspace<double> ws;
      const MatX& y = forward(net, input, ws);
      MatX d_out = y - target;
      VecX an;
      backward(net, ws, d_out, an);
      VecX fd(net.params.size());
      for (Eigen::Index p = 0; p < net.params.size(); ++p) {
        double orig = net.params[p];
        net.params[p] = orig + kGradFdStep;
        double fp = loss();
        net.params[p] = orig - kGradFdStep;
        double fm = loss();
        net.params[p] = orig;
        fd[p] = (fp - fm) / (2.0 * kGradFdStep);
      }
      worst_bwd = std::max(worst_bwd, rel_vec_err(an, fd));
    }
  }

  r.pass = worst_chamfer < kGradRelTol && worst_geo < kGradRelTol &&
           worst_bwd < kGradRelTol;
  r.details = fmt("rel err chamfer %.2e, geodesic %.2e, backward %.2e (tol %.0e)",
                  worst_chamfer, worst_geo, worst_bwd, kGradRelTol);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: curvature identity on a fitted embedding.
CriterionResult c_pythagoras() {
  CriterionResult r;
  TrainingConfig tc;
  tc.seed = kSeedPythagoras;
  tc.steps = 20;
  tc.sample_batch = 256;
  tc.pair_batch = 4096;
  ShapeParams sp;
  FittedShape fs = fit_pipeline(ShapeKind::sphere, sp, 256, 8, tc);

  SampleSet samples = sample_unit_ball(4096, derive_seed(kSeedPythagoras, "eval"));
  LiftedEmbedding emb = embed(fs.result.network, samples);
  Eigen::Index m = emb.size();
  Rng rng(derive_seed(kSeedPythagoras, "pairs"));
  double worst_rel = 0.0, min_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 10000; ++t) {
    auto i = Eigen::Index(rng.uniform_index(std::uint64_t(m)));
    auto j = Eigen::Index(rng.uniform_index(std::uint64_t(m)));
    if (i == j) continue;
    double dx2 = (emb.Z.col(i).head<3>() - emb.Z.col(j).head<3>()).squaredNorm();
    double dw2 = (emb.Z.col(i).tail(emb.Z.rows() - 3) -
                  emb.Z.col(j).tail(emb.Z.rows() - 3))
                     .squaredNorm();
    double ghat = emb.ghat(i, j);
    double rel = std::abs(ghat * ghat - (dx2 + dw2)) / std::max(ghat * ghat, 1e-300);
    worst_rel = std::max(worst_rel, rel);
    min_margin = std::min(min_margin, ghat - std::sqrt(dx2));
  }
  r.pass = worst_rel < kIdentityRelTol && min_margin >= 0.0;
  r.details = fmt("max rel identity err %.3g (tol %.0e); min(ghat - |dx|) %.3g",
                  worst_rel, kIdentityRelTol, min_margin);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: cut_cylinder_band fit quality plus the lambda_G = 0 ablation.
CriterionResult c_cut_fit() {
  CriterionResult r;
  ShapeParams sp;
  TrainingConfig tc;
  tc.seed = kSeedCutFit;
  tc.steps = 5000;
  PointCloud cloud =
      normalize_to_unit_box(gen_shape(ShapeKind::cut_cylinder_band, sp, 4096, tc.seed))
          .first;
  NeighborGraph graph = build_graph(cloud, 8);
  GeodesicMatrix D = all_pairs_geodesics(graph);
  SoftGeodesicContext ctx = make_ctx(graph, D, tc);

  TrainResult full = fit_object(cloud, ctx, tc);
  SampleSet es = sample_unit_ball(4096, derive_seed(kSeedCutFit, "eval"));
  LiftedEmbedding emb = embed(full.network, es);
  double cham =
      to_paper_units(chamfer(Mat3X(emb.X()), cloud.points), longest_bbox_side(cloud.points));
  double mre = held_out_mre(emb, cloud, D, 1000, derive_seed(kSeedCutFit, "held-out"));

  TrainingConfig ta = tc;
  ta.weights.lambda_g = 0.0;
  TrainResult ablation = fit_object(cloud, ctx, ta);
  LiftedEmbedding emb_a = embed(ablation.network, es);
  double mre_a =
      held_out_mre(emb_a, cloud, D, 1000, derive_seed(kSeedCutFit, "held-out"));

  r.pass = cham < kCutChamferMax && mre < kCutMreMax && mre_a > kAblationFactor * mre;
  r.details = fmt(
      "chamfer %.4f paper units (< %.1f); mre %.4f (< %.2f); ablation mre %.4f "
      "(> %.1fx = %.4f)",
      cham, kCutChamferMax, mre, kCutMreMax, mre_a, kAblationFactor,
      kAblationFactor * mre);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: thin plate short-circuit resistance.
CriterionResult c_thin_plate() {
  CriterionResult r;
  // A quarter-size plate keeps the 8-NN radius below the 0.02 face gap at
  // n=4096, so the ground-truth graph follows the surface instead of
  // tunneling between the faces (after unit-box normalization the gap is
  // 0.08). The Euclidean 16-neighborhoods at 1024 eval samples span ~0.11,
  // wider than the gap, so they still short-circuit.
  ShapeParams sp;
  sp.size = 0.25;
  TrainingConfig tc;
  tc.seed = kSeedThinPlate;
  tc.steps = 5000;
  FittedShape fs = fit_pipeline(ShapeKind::thin_plate, sp, 4096, 8, tc);

  SampleSet es = sample_unit_ball(1024, derive_seed(kSeedThinPlate, "eval"));
  LiftedEmbedding emb = embed(fs.result.network, es);
  Mat3X X = emb.X();
  Eigen::Index m = X.cols();

  Mat3X n_euc, n_geo;
  pred_normals(emb, kPlateNormalK, &n_euc, &n_geo);
  OrientedPointSet gt{fs.cloud.points, fs.cloud.normals};
  double gamma_euc = normal_consistency(gt, {X, n_euc});
  double gamma_geo = normal_consistency(gt, {X, n_geo});

  std::vector<int> ref = nearest_labels(X, fs.cloud);
  std::int64_t considered = 0, good = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (ref[std::size_t(i)] != 0) continue;
    if (std::abs(X(0, i)) > kPlateInteriorHalf || std::abs(X(1, i)) > kPlateInteriorHalf)
      continue;
    ++considered;
    auto euc = euclidean_neighborhood(X, i, kPlateNormalK);
    auto geo = geodesic_neighborhood(emb, i, kPlateNormalK);
    int euc_bottom = 0, geo_bottom = 0;
    for (Eigen::Index j : euc) euc_bottom += ref[std::size_t(j)] == 1;
    for (Eigen::Index j : geo) geo_bottom += ref[std::size_t(j)] == 1;
    good += (euc_bottom >= 1 && geo_bottom == 0);
  }
  double frac = considered > 0 ? double(good) / double(considered) : 0.0;

  r.pass = gamma_geo >= gamma_euc && frac >= kPlateFraction && considered > 100;
  r.details = fmt(
      "normal_geo %.4f >= normal_euc %.4f; clean-separation %.3f (>= %.2f) over "
      "%lld interior top points",
      gamma_geo, gamma_euc, frac, kPlateFraction, (long long)considered);
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: cube chart decomposition purity, W vs X clustering.
CriterionResult c_cube_charts() {
  CriterionResult r;
  ShapeParams sp;
  TrainingConfig tc;
  tc.seed = kSeedCubeCharts;
  tc.steps = 5000;
  FittedShape fs = fit_pipeline(ShapeKind::cube, sp, 4096, 8, tc);

  SampleSet es = sample_unit_ball(4096, derive_seed(kSeedCubeCharts, "eval"));
  LiftedEmbedding emb = embed(fs.result.network, es);
  Mat3X X = emb.X();
  std::vector<int> ref = nearest_labels(X, fs.cloud);

  ChartAssignment cw =
      decompose_charts(MatX(emb.W()), 6, derive_seed(kSeedCubeCharts, "charts-w"));
  ChartAssignment cx =
      decompose_charts(MatX(X), 6, derive_seed(kSeedCubeCharts, "charts-x"));
  double pw = chart_purity(cw, ref);
  double px = chart_purity(cx, ref);

  r.pass = pw >= kPurityMin && pw > px;
  r.details = fmt("purity(W) %.4f (>= %.2f), purity(X) %.4f, W > X: %s", pw,
                  kPurityMin, px, pw > px ? "yes" : "no");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: sphere mesh pipeline.
CriterionResult c_mesh_pipeline() {
  CriterionResult r;
  ShapeParams sp;
  TrainingConfig tc;
  tc.seed = kSeedMeshPipeline;
  tc.steps = 2000;
  FittedShape fs = fit_pipeline(ShapeKind::sphere, sp, 2048, 8, tc);

  SampleSet es = sample_unit_ball(4096, derive_seed(kSeedMeshPipeline, "eval"));
  LiftedEmbedding emb = embed(fs.result.network, es);
  MeshResult mr = reconstruct_mesh(emb, 6, 12, 100, kSeedMeshPipeline);

  bool traces_ok = true;
  for (const ChartSurface& s : mr.surfaces)
    if (s.fit_trace.back() > s.fit_trace.front()) traces_ok = false;

  std::string dir = scratch_dir("mesh-pipeline");
  std::string p1 = dir + "/mesh.obj", p2 = dir + "/mesh_rt.obj";
  write_obj(p1, mr.mesh);
  TriangleMesh rt = read_obj(p1);
  write_obj(p2, rt);
  bool obj_ok = slurp(p1) == slurp(p2) && rt.vertices.cols() == mr.mesh.vertices.cols() &&
                rt.face_count() == mr.mesh.face_count();

  OrientedPointSet ms =
      sample_mesh_surface(mr.mesh, 10000, derive_seed(kSeedMeshPipeline, "mesh-eval"));
  double cham = chamfer(ms.points, fs.cloud.points);

  r.pass = cham < kMeshChamferMax && traces_ok && obj_ok;
  r.details = fmt(
      "mesh chamfer %.5f raw (< %.3f); %zu/6 charts, traces final<=initial: %s; "
      "OBJ round-trip: %s",
      cham, kMeshChamferMax, mr.surfaces.size(), traces_ok ? "yes" : "NO",
      obj_ok ? "yes" : "NO");
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: bit determinism of cmd_fit and byte-exact format round-trips.
CriterionResult c_determinism() {
  CriterionResult r;
  std::string dir = scratch_dir("determinism");

  PointCloud cloud = normalize_to_unit_box(
                         gen_shape(ShapeKind::sphere, ShapeParams{}, 512, kSeedDeterminism))
                         .first;
  write_ply(dir + "/cloud.ply", cloud);
  NeighborGraph graph = build_graph(cloud, 8);
  GeodesicMatrix D = all_pairs_geodesics(graph);
  save_geodesic_matrix(dir + "/geodesics.dm1", D);

  Json cfg;
  cfg["cloud"] = dir + "/cloud.ply";
  cfg["dm"] = dir + "/geodesics.dm1";
  cfg["steps"] = 60;
  cfg["sample_batch"] = 512;
  cfg["pair_batch"] = 4096;
  cfg["seed"] = kSeedDeterminism;
  cfg["export_samples"] = 512;
  Json cfg_a = cfg, cfg_b = cfg;
  cfg_a["out"] = dir + "/fit_a";
  cfg_b["out"] = dir + "/fit_b";
  cmd_fit(cfg_a);
  cmd_fit(cfg_b);

  bool fit_same = true;
  for (const char* f : {"network.nn1", "embedding.txt", "trace.json"})
    if (slurp(dir + "/fit_a/" + f) != slurp(dir + "/fit_b/" + f)) fit_same = false;

  bool rt_ok = true;
  auto check_rt = [&](const std::string& a, const std::string& b) {
    if (slurp(a) != slurp(b)) rt_ok = false;
  };
  {
    PointCloud labeled = gen_shape(ShapeKind::cube, ShapeParams{}, 64, kSeedDeterminism);
    write_xyz(dir + "/rt_a.xyz", labeled);
    write_xyz(dir + "/rt_b.xyz", read_xyz(dir + "/rt_a.xyz"));
    check_rt(dir + "/rt_a.xyz", dir + "/rt_b.xyz");
    write_ply(dir + "/rt_a.ply", labeled);
    write_ply(dir + "/rt_b.ply", read_ply(dir + "/rt_a.ply"));
    check_rt(dir + "/rt_a.ply", dir + "/rt_b.ply");
  }
  {
    save_geodesic_matrix(dir + "/rt_b.dm1",
                         load_geodesic_matrix(dir + "/geodesics.dm1"));
    check_rt(dir + "/geodesics.dm1", dir + "/rt_b.dm1");
  }
  {
    Mlp net = load_network(dir + "/fit_a/network.nn1");
    save_network(dir + "/rt_b.nn1", net);
    check_rt(dir + "/fit_a/network.nn1", dir + "/rt_b.nn1");
  }
  {
    LiftedEmbedding emb = read_embedding(dir + "/fit_a/embedding.txt");
    write_embedding(dir + "/rt_b.txt", emb);
    check_rt(dir + "/fit_a/embedding.txt", dir + "/rt_b.txt");
  }
  {
    TriangleMesh mesh;
    mesh.vertices.resize(3, 4);
    mesh.vertices << 0, 1, 0, 1, 0, 0, 1, 1, 0, 0.25, 0.5, 0.75;
    mesh.faces.resize(3, 2);
    mesh.faces << 0, 1, 1, 3, 2, 2;
    mesh.face_chart = {0, 2};
    write_obj(dir + "/rt_a.obj", mesh);
    write_obj(dir + "/rt_b.obj", read_obj(dir + "/rt_a.obj"));
    check_rt(dir + "/rt_a.obj", dir + "/rt_b.obj");
  }

  r.pass = fit_same && rt_ok;
  r.details = fmt("repeated fit byte-identical: %s; format round-trips byte-exact: %s",
                  fit_same ? "yes" : "NO", rt_ok ? "yes" : "NO");
  return r;
}

struct Entry {
  const char* name;
  double budget_seconds;  // 0 = no budget gate
  CriterionResult (*fn)();
};

const Entry kEntries[] = {
    {"sphere-oracle", 30.0, c_sphere_oracle},
    {"soft-exact", 0.0, c_soft_exact},
    {"gradients", 60.0, c_gradients},
    {"pythagoras", 0.0, c_pythagoras},
    {"cut-fit", 600.0, c_cut_fit},
    {"thin-plate", 600.0, c_thin_plate},
    {"cube-charts", 600.0, c_cube_charts},
    {"mesh-pipeline", 300.0, c_mesh_pipeline},
    {"determinism", 0.0, c_determinism},
};

}  // namespace

std::vector<std::string> criterion_names() {
  std::vector<std::string> names;
  for (const Entry& e : kEntries) names.emplace_back(e.name);
  return names;
}

CriterionResult run_criterion(const std::string& name) {
  const Entry* entry = nullptr;
  for (const Entry& e : kEntries)
    if (name == e.name) entry = &e;
  if (!entry) {
    std::string avail;
    for (const Entry& e : kEntries) avail += std::string(" ") + e.name;
    throw validation_error("unknown suite '" + name + "'; available:" + avail);
  }
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = entry->fn();
  } catch (const std::exception& ex) {
    r.pass = false;
    r.details = std::string("error: ") + ex.what();
  }
  r.name = entry->name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (entry->budget_seconds > 0.0 && r.seconds > entry->budget_seconds) {
    r.pass = false;
    r.details += fmt("; over %.0fs budget", entry->budget_seconds);
  }
  return r;
}

int run_suite(const std::string& name, std::ostream& out) {
  std::vector<std::string> names;
  if (name == "all")
    names = criterion_names();
  else
    names.push_back(name);
  int failures = 0;
  for (const std::string& n : names) {
    CriterionResult r = run_criterion(n);
    failures += !r.pass;
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << fmt("%.1f", r.seconds)
        << "s): " << r.details << "\n";
    out.flush();
  }
  return failures;
}

}  // namespace ghof::repro
