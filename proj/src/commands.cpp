#include "ghof/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <utility>
#include <vector>

#include "ghof/chart_mesh.hpp"
#include "ghof/cloud_io.hpp"
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

namespace ghof {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

std::string req_path(const Json& config, const char* key, const char* cmd) {
  std::string p = jget(config, key, std::string());
  if (p.empty())
    throw validation_error(std::string(cmd) + ": required input '" + key +
                           "' is missing");
  return p;
}

std::string iso_utc_now() {
  std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// config.json carries only deterministic content; the timestamp lives in
// run_meta.json so numeric artifacts stay byte-identical across reruns.
void write_run_files(const std::string& dir, const std::string& command,
                     const Json& eff) {
  write_text_file(join(dir, "config.json"), config_echo(eff));
  Json meta;
  meta["command"] = command;
  meta["config_fnv1a64"] = config_hash_hex(eff);
  meta["timestamp"] = iso_utc_now();
  write_text_file(join(dir, "run_meta.json"), meta.dump(2) + "\n");
}

Mat3X gather3(const Mat3X& X, const std::vector<Eigen::Index>& idx) {
  Mat3X out(3, Eigen::Index(idx.size()));
  for (std::size_t t = 0; t < idx.size(); ++t) out.col(Eigen::Index(t)) = X.col(idx[t]);
  return out;
}

}  // namespace

Json EvalReport::to_json() const {
  Json j;
  auto put = [&](const char* key, double v) {
    if (std::isnan(v))
      j[key] = nullptr;
    else
      j[key] = v;
  };
  put("chamfer_raw", chamfer_raw);
  put("chamfer_paper_units", chamfer_paper_units);
  put("normal_consistency", normal_consistency);
  put("normal_euc", normal_euc);
  put("normal_geo", normal_geo);
  put("geodesic_mre", geodesic_mre);
  put("chart_purity", chart_purity);
  j["seed"] = seed;
  j["config_fnv1a64"] = config_hash;
  return j;
}

double longest_bbox_side(const Mat3X& points) {
  if (points.cols() == 0) throw validation_error("empty point set has no bounding box");
  Vec3 ext = points.rowwise().maxCoeff() - points.rowwise().minCoeff();
  double side = ext.maxCoeff();
  if (!(side > 0.0)) throw validation_error("degenerate bounding box");
  return side;
}

double to_paper_units(double chamfer_raw, double longest_side) {
  double unit = 0.1 * longest_side;
  return chamfer_raw / (unit * unit);
}

int cmd_gen(const Json& config) {
  reject_unknown_keys(config,
                      {"out", "kind", "n", "seed", "normalize", "format", "radius",
                       "edge", "height", "angle", "size", "thickness", "major_radius",
                       "minor_radius", "roll_scale", "t0", "t1", "width"},
                      "gen");
  ShapeKind kind = parse_shape_kind(jget(config, "kind", std::string("sphere")));
  std::int64_t n = jget(config, "n", std::int64_t(4096));
  if (n < 4) throw validation_error("gen: n must be at least 4");
  std::uint64_t seed = jget(config, "seed", std::uint64_t(1));
  bool normalize = jget(config, "normalize", true);
  std::string format = jget(config, "format", std::string("ply"));
  if (format != "ply" && format != "xyz")
    throw validation_error("gen: format must be 'ply' or 'xyz'");

  ShapeParams params;
  params.radius = jget(config, "radius", params.radius);
  params.edge = jget(config, "edge", params.edge);
  params.height = jget(config, "height", params.height);
  params.angle = jget(config, "angle", params.angle);
  params.size = jget(config, "size", params.size);
  params.thickness = jget(config, "thickness", params.thickness);
  params.major_radius = jget(config, "major_radius", params.major_radius);
  params.minor_radius = jget(config, "minor_radius", params.minor_radius);
  params.roll_scale = jget(config, "roll_scale", params.roll_scale);
  params.t0 = jget(config, "t0", params.t0);
  params.t1 = jget(config, "t1", params.t1);
  params.width = jget(config, "width", params.width);

  PointCloud cloud = gen_shape(kind, params, n, seed);
  if (normalize) cloud = normalize_to_unit_box(cloud).first;
  cloud.validate();

  std::string dir = resolve_out_dir(config, "gen");
  Json eff;
  eff["out"] = dir;
  eff["kind"] = shape_kind_name(kind);
  eff["n"] = n;
  eff["seed"] = seed;
  eff["normalize"] = normalize;
  eff["format"] = format;
  eff["radius"] = params.radius;
  eff["edge"] = params.edge;
  eff["height"] = params.height;
  eff["angle"] = params.angle;
  eff["size"] = params.size;
  eff["thickness"] = params.thickness;
  eff["major_radius"] = params.major_radius;
  eff["minor_radius"] = params.minor_radius;
  eff["roll_scale"] = params.roll_scale;
  eff["t0"] = params.t0;
  eff["t1"] = params.t1;
  eff["width"] = params.width;

  std::string cloud_path = join(dir, "cloud." + format);
  write_cloud(cloud_path, cloud);
  write_run_files(dir, "gen", eff);
  std::cout << "gen: " << shape_kind_name(kind) << " n=" << cloud.size()
            << (cloud.has_labels() ? " (labeled)" : "") << " -> " << cloud_path
            << "\n";
  return 0;
}

int cmd_geodesics(const Json& config) {
  reject_unknown_keys(config, {"out", "cloud", "k"}, "geodesics");
  std::string cloud_path = req_path(config, "cloud", "geodesics");
  int k = jget(config, "k", 8);
  PointCloud cloud = read_cloud(cloud_path);
  cloud.validate();

  int bridges = 0;
  NeighborGraph graph = build_graph(cloud, k, &bridges);
  GeodesicMatrix D = all_pairs_geodesics(graph);

  std::string dir = resolve_out_dir(config, "geodesics");
  Json eff;
  eff["out"] = dir;
  eff["cloud"] = cloud_path;
  eff["k"] = k;

  save_geodesic_matrix(join(dir, "geodesics.dm1"), D);

  Eigen::Index n = D.size();
  double min_d = std::numeric_limits<double>::infinity();
  double max_d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      min_d = std::min(min_d, D(i, j));
      max_d = std::max(max_d, D(i, j));
    }
  Json summary;
  summary["n"] = n;
  summary["k"] = k;
  summary["bridges"] = bridges;
  summary["mean_edge_length"] = mean_edge_length(graph);
  summary["min_distance"] = min_d;
  summary["max_distance"] = max_d;
  write_text_file(join(dir, "summary.json"), summary.dump(2) + "\n");
  write_run_files(dir, "geodesics", eff);
  std::cout << "geodesics: n=" << n << " k=" << k << " bridges=" << bridges
            << " max=" << format_double(max_d) << " -> " << dir << "\n";
  return 0;
}

int cmd_fit(const Json& config) {
  reject_unknown_keys(
      config, {"out", "cloud", "dm", "k", "steps", "learning_rate", "beta1", "beta2",
               "epsilon", "lambda_c", "lambda_g", "pair_batch", "sample_batch",
               "seed", "k_lambda", "bandwidth", "lifting_dim", "hidden",
               "export_samples"},
      "fit");
  std::string cloud_path = req_path(config, "cloud", "fit");
  std::string dm_path = req_path(config, "dm", "fit");
  int k = jget(config, "k", 8);
  std::int64_t export_samples = jget(config, "export_samples", std::int64_t(4096));
  if (export_samples < 4) throw validation_error("fit: export_samples must be >= 4");

  TrainingConfig tc;
  tc.steps = jget(config, "steps", tc.steps);
  tc.learning_rate = jget(config, "learning_rate", tc.learning_rate);
  tc.adam_beta1 = jget(config, "beta1", tc.adam_beta1);
  tc.adam_beta2 = jget(config, "beta2", tc.adam_beta2);
  tc.adam_epsilon = jget(config, "epsilon", tc.adam_epsilon);
  tc.weights.lambda_c = jget(config, "lambda_c", tc.weights.lambda_c);
  tc.weights.lambda_g = jget(config, "lambda_g", tc.weights.lambda_g);
  tc.pair_batch = jget(config, "pair_batch", tc.pair_batch);
  tc.sample_batch = jget(config, "sample_batch", tc.sample_batch);
  tc.seed = jget(config, "seed", tc.seed);
  tc.k_lambda = jget(config, "k_lambda", tc.k_lambda);
  tc.bandwidth = jget(config, "bandwidth", tc.bandwidth);
  tc.lifting_dim = jget(config, "lifting_dim", tc.lifting_dim);
  tc.hidden = jget(config, "hidden", tc.hidden);
  tc.validate();

  PointCloud cloud = read_cloud(cloud_path);
  cloud.validate();
  GeodesicMatrix D = load_geodesic_matrix(dm_path);
  if (D.size() != cloud.size())
    throw validation_error("fit: distance matrix size " + std::to_string(D.size()) +
                           " does not match cloud size " +
                           std::to_string(cloud.size()));

  NeighborGraph graph = build_graph(cloud, k);
  SoftGeodesicContext ctx;
  ctx.graph = &graph;
  ctx.D = &D;
  ctx.k_lambda = tc.k_lambda;
  ctx.bandwidth = tc.bandwidth > 0.0 ? tc.bandwidth : default_bandwidth(graph);

  TrainResult result = fit_object(cloud, ctx, tc);

  std::string dir = resolve_out_dir(config, "fit");
  Json eff;
  eff["out"] = dir;
  eff["cloud"] = cloud_path;
  eff["dm"] = dm_path;
  eff["k"] = k;
  eff["steps"] = tc.steps;
  eff["learning_rate"] = tc.learning_rate;
  eff["beta1"] = tc.adam_beta1;
  eff["beta2"] = tc.adam_beta2;
  eff["epsilon"] = tc.adam_epsilon;
  eff["lambda_c"] = tc.weights.lambda_c;
  eff["lambda_g"] = tc.weights.lambda_g;
  eff["pair_batch"] = tc.pair_batch;
  eff["sample_batch"] = tc.sample_batch;
  eff["seed"] = tc.seed;
  eff["k_lambda"] = tc.k_lambda;
  eff["bandwidth"] = tc.bandwidth;
  eff["lifting_dim"] = tc.lifting_dim;
  eff["hidden"] = tc.hidden;
  eff["export_samples"] = export_samples;

  save_network(join(dir, "network.nn1"), result.network);

  Json sidecar;
  sidecar["sizes"] = result.network.sizes;
  sidecar["activation"] = "leaky_relu";
  sidecar["leaky_slope"] = result.network.leaky_slope;
  sidecar["lifting_dim"] = tc.lifting_dim;
  sidecar["bandwidth_used"] = ctx.bandwidth;
  write_text_file(join(dir, "network.json"), sidecar.dump(2) + "\n");

  Json trace = Json::array();
  for (std::size_t s = 0; s < result.trace.size(); ++s) {
    const LossReport& r = result.trace[s];
    Json e;
    e["step"] = s;
    e["chamfer"] = r.chamfer;
    e["geodesic"] = r.geodesic;
    e["total"] = r.total;
    e["pairs"] = r.pair_count;
    trace.push_back(std::move(e));
  }
  write_text_file(join(dir, "trace.json"), trace.dump(2) + "\n");

  SampleSet samples = sample_unit_ball(export_samples, derive_seed(tc.seed, "export"));
  LiftedEmbedding emb = embed(result.network, samples);
  write_embedding(join(dir, "embedding.txt"), emb);
  write_run_files(dir, "fit", eff);

  const LossReport& first = result.trace.front();
  const LossReport& last = result.trace.back();
  std::cout << "fit: " << tc.steps << " steps, total " << format_double(first.total)
            << " -> " << format_double(last.total) << " (chamfer "
            << format_double(last.chamfer) << ", geodesic "
            << format_double(last.geodesic) << ") -> " << dir << "\n";
  return 0;
}

int cmd_analyze(const Json& config) {
  reject_unknown_keys(config,
                      {"out", "checkpoint", "cloud", "dm", "k_normals", "charts",
                       "eval_samples", "eval_pairs", "seed"},
                      "analyze");
  std::string checkpoint = req_path(config, "checkpoint", "analyze");
  std::string cloud_path = req_path(config, "cloud", "analyze");
  std::string dm_path = jget(config, "dm", std::string());
  int k_normals = jget(config, "k_normals", 16);
  int chart_count = jget(config, "charts", 0);
  std::int64_t eval_samples = jget(config, "eval_samples", std::int64_t(10000));
  std::int64_t eval_pairs = jget(config, "eval_pairs", std::int64_t(1000));
  std::uint64_t seed = jget(config, "seed", std::uint64_t(1));
  if (k_normals < 3) throw validation_error("analyze: k_normals must be >= 3");
  if (chart_count < 0) throw validation_error("analyze: charts must be >= 0");
  if (eval_samples < 4) throw validation_error("analyze: eval_samples must be >= 4");
  if (eval_pairs < 1) throw validation_error("analyze: eval_pairs must be >= 1");

  Mlp net = load_network(checkpoint);
  PointCloud cloud = read_cloud(cloud_path);
  cloud.validate();

  SampleSet samples = sample_unit_ball(eval_samples, derive_seed(seed, "eval"));
  LiftedEmbedding emb = embed(net, samples);
  Mat3X X = emb.X();
  Eigen::Index m = X.cols();

  std::string dir = resolve_out_dir(config, "analyze");
  Json eff;
  eff["out"] = dir;
  eff["checkpoint"] = checkpoint;
  eff["cloud"] = cloud_path;
  eff["dm"] = dm_path;
  eff["k_normals"] = k_normals;
  eff["charts"] = chart_count;
  eff["eval_samples"] = eval_samples;
  eff["eval_pairs"] = eval_pairs;
  eff["seed"] = seed;

  EvalReport rep;
  rep.seed = seed;
  rep.config_hash = config_hash_hex(eff);
  double side = longest_bbox_side(cloud.points);
  rep.chamfer_raw = chamfer(X, cloud.points);
  rep.chamfer_paper_units = to_paper_units(rep.chamfer_raw, side);

  if (cloud.has_normals() && m > k_normals) {
    OrientedPointSet gt{cloud.points, cloud.normals};
    Mat3X n_euc(3, m), n_geo(3, m);
    parallel_for(m, 128, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i) {
        n_euc.col(i) = estimate_normal(gather3(X, euclidean_neighborhood(X, i, k_normals)));
        n_geo.col(i) = estimate_normal(gather3(X, geodesic_neighborhood(emb, i, k_normals)));
      }
    });
    rep.normal_euc = ghof::normal_consistency(gt, {X, n_euc});
    rep.normal_geo = ghof::normal_consistency(gt, {X, n_geo});
    write_xyz(join(dir, "pred_normals_euc.xyz"), {X, n_euc, {}});
    write_xyz(join(dir, "pred_normals_geo.xyz"), {X, n_geo, {}});
  }

  std::int64_t pairs_used = 0;
  if (!dm_path.empty()) {
    GeodesicMatrix D = load_geodesic_matrix(dm_path);
    if (D.size() != cloud.size())
      throw validation_error("analyze: distance matrix does not match cloud size");
    Rng rng(derive_seed(seed, "pairs"));
    std::vector<Eigen::Index> snap(m);
    parallel_for(m, 256, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t i = begin; i < end; ++i)
        snap[i] = nearest(cloud.points, X.col(i)).first;
    });
    double sum = 0.0;
    std::int64_t attempts = 0, max_attempts = eval_pairs * 1000;
    while (pairs_used < eval_pairs && attempts < max_attempts) {
      ++attempts;
      Eigen::Index a = Eigen::Index(rng.uniform_index(std::uint64_t(m)));
      Eigen::Index b = Eigen::Index(rng.uniform_index(std::uint64_t(m)));
      if (a == b) continue;
      double g = D(snap[a], snap[b]);
      if (!(g > 0.1)) continue;
      sum += std::abs(emb.ghat(a, b) - g) / g;
      ++pairs_used;
    }
    if (pairs_used > 0) rep.geodesic_mre = sum / double(pairs_used);
  }

  if (chart_count > 0) {
    ChartAssignment charts =
        decompose_charts(MatX(emb.W()), chart_count, derive_seed(seed, "charts"));
    write_xyz(join(dir, "charts.xyz"), {X, {}, charts.labels});
    if (cloud.has_labels()) {
      std::vector<int> ref(m);
      for (Eigen::Index i = 0; i < m; ++i)
        ref[i] = cloud.labels[nearest(cloud.points, X.col(i)).first];
      rep.chart_purity = chart_purity(charts, ref);
    }
  }

  Json report = rep.to_json();
  report["geodesic_pairs_used"] = pairs_used;
  report["longest_side"] = side;
  write_text_file(join(dir, "report.json"), report.dump(2) + "\n");
  write_run_files(dir, "analyze", eff);

  std::cout << "analyze: chamfer " << format_double(rep.chamfer_paper_units)
            << " paper units";
  if (!std::isnan(rep.normal_euc))
    std::cout << ", normal_euc " << format_double(rep.normal_euc) << ", normal_geo "
              << format_double(rep.normal_geo);
  if (!std::isnan(rep.geodesic_mre))
    std::cout << ", geodesic_mre " << format_double(rep.geodesic_mre);
  if (!std::isnan(rep.chart_purity))
    std::cout << ", purity " << format_double(rep.chart_purity);
  std::cout << " -> " << dir << "\n";
  return 0;
}

int cmd_mesh(const Json& config) {
  reject_unknown_keys(config,
                      {"out", "checkpoint", "cloud", "charts", "res", "chart_steps",
                       "samples", "eval_samples", "seed"},
                      "mesh");
  std::string checkpoint = req_path(config, "checkpoint", "mesh");
  std::string cloud_path = req_path(config, "cloud", "mesh");
  int chart_count = jget(config, "charts", 6);
  int res = jget(config, "res", 12);
  std::int64_t chart_steps = jget(config, "chart_steps", std::int64_t(100));
  std::int64_t samples_n = jget(config, "samples", std::int64_t(4096));
  std::int64_t eval_samples = jget(config, "eval_samples", std::int64_t(10000));
  std::uint64_t seed = jget(config, "seed", std::uint64_t(1));
  if (chart_count < 1) throw validation_error("mesh: charts must be >= 1");
  if (res < 2) throw validation_error("mesh: res must be >= 2");
  if (chart_steps < 1) throw validation_error("mesh: chart_steps must be >= 1");
  if (samples_n < 16) throw validation_error("mesh: samples must be >= 16");
  if (eval_samples < 1) throw validation_error("mesh: eval_samples must be >= 1");

  Mlp net = load_network(checkpoint);
  PointCloud cloud = read_cloud(cloud_path);
  cloud.validate();

  SampleSet samples = sample_unit_ball(samples_n, derive_seed(seed, "mesh-embed"));
  LiftedEmbedding emb = embed(net, samples);
  MeshResult mr = reconstruct_mesh(emb, chart_count, res, chart_steps, seed);

  std::string dir = resolve_out_dir(config, "mesh");
  Json eff;
  eff["out"] = dir;
  eff["checkpoint"] = checkpoint;
  eff["cloud"] = cloud_path;
  eff["charts"] = chart_count;
  eff["res"] = res;
  eff["chart_steps"] = chart_steps;
  eff["samples"] = samples_n;
  eff["eval_samples"] = eval_samples;
  eff["seed"] = seed;

  write_obj(join(dir, "mesh.obj"), mr.mesh);

  OrientedPointSet mesh_samples =
      sample_mesh_surface(mr.mesh, eval_samples, derive_seed(seed, "gt-eval"));
  EvalReport rep;
  rep.seed = seed;
  rep.config_hash = config_hash_hex(eff);
  double side = longest_bbox_side(cloud.points);
  rep.chamfer_raw = chamfer(mesh_samples.points, cloud.points);
  rep.chamfer_paper_units = to_paper_units(rep.chamfer_raw, side);
  if (cloud.has_normals())
    rep.normal_consistency =
        ghof::normal_consistency({cloud.points, cloud.normals}, mesh_samples);

  Json report = rep.to_json();
  report["chamfer_embed"] = mr.chamfer_to_points;
  report["charts_fitted"] = mr.surfaces.size();
  report["vertices"] = mr.mesh.vertices.cols();
  report["faces"] = mr.mesh.face_count();
  report["longest_side"] = side;
  write_text_file(join(dir, "report.json"), report.dump(2) + "\n");
  write_run_files(dir, "mesh", eff);

  std::cout << "mesh: " << mr.surfaces.size() << "/" << chart_count << " charts, "
            << mr.mesh.vertices.cols() << " vertices, " << mr.mesh.face_count()
            << " faces, chamfer " << format_double(rep.chamfer_raw) << " raw -> "
            << dir << "\n";
  return 0;
}

}  // namespace ghof
