#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <streambuf>
#include <string>

#include <CLI11.hpp>

#include "ghof/commands.hpp"
#include "ghof/config.hpp"
#include "ghof/parallel.hpp"
#include "ghof/repro.hpp"

namespace {

using ghof::Json;

struct TeeBuf : std::streambuf {
  std::streambuf* a;
  std::streambuf* b;
  TeeBuf(std::streambuf* x, std::streambuf* y) : a(x), b(y) {}
  int overflow(int c) override {
    if (c != EOF) {
      a->sputc(char(c));
      b->sputc(char(c));
    }
    return c;
  }
  int sync() override {
    a->pubsync();
    b->pubsync();
    return 0;
  }
};

struct SubState {
  CLI::App* cmd = nullptr;
  std::string config_path;
  Json overrides;
};

void add_common(SubState& s) {
  s.cmd->add_option("--config", s.config_path, "JSON config file; flags win over it");
  s.cmd->add_option_function<std::string>(
      "--out", [&s](const std::string& v) { s.overrides["out"] = v; },
      "Output directory (default $GHOF_OUT_ROOT/<command>)");
}

void opt_str(SubState& s, const std::string& flag, const std::string& key,
             const std::string& desc) {
  s.cmd->add_option_function<std::string>(
      flag, [&s, key](const std::string& v) { s.overrides[key] = v; }, desc);
}

void opt_f(SubState& s, const std::string& flag, const std::string& key,
           const std::string& desc) {
  s.cmd->add_option_function<double>(
      flag, [&s, key](double v) { s.overrides[key] = v; }, desc);
}

void opt_i(SubState& s, const std::string& flag, const std::string& key,
           const std::string& desc) {
  s.cmd->add_option_function<std::int64_t>(
      flag, [&s, key](std::int64_t v) { s.overrides[key] = v; }, desc);
}

void opt_u(SubState& s, const std::string& flag, const std::string& key,
           const std::string& desc) {
  s.cmd->add_option_function<std::uint64_t>(
      flag, [&s, key](std::uint64_t v) { s.overrides[key] = v; }, desc);
}

void opt_b(SubState& s, const std::string& flag, const std::string& key,
           const std::string& desc) {
  s.cmd->add_option_function<bool>(
      flag, [&s, key](bool v) { s.overrides[key] = v; }, desc);
}

Json effective(const SubState& s) {
  Json cfg = ghof::load_config_file(s.config_path);
  for (auto it = s.overrides.begin(); it != s.overrides.end(); ++it)
    cfg[it.key()] = it.value();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghof: surfaces as geodesic-lifted point embeddings"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker thread cap (0 = hardware concurrency); never changes results");

  SubState gen, geod, fit, analyze, mesh;

  gen.cmd = app.add_subcommand("gen", "Generate a synthetic shape point cloud");
  add_common(gen);
  opt_str(gen, "--kind", "kind",
          "sphere | cube | cut_cylinder_band | thin_plate | torus | swiss_roll");
  opt_i(gen, "--n", "n", "Sample count (default 4096)");
  opt_u(gen, "--seed", "seed", "RNG seed (default 1)");
  opt_b(gen, "--normalize", "normalize",
        "Center and scale longest bounding-box side to 1 (default true)");
  opt_str(gen, "--format", "format", "ply | xyz (default ply)");
  opt_f(gen, "--radius", "radius", "Sphere / cylinder radius");
  opt_f(gen, "--edge", "edge", "Cube edge length");
  opt_f(gen, "--height", "height", "Cylinder height");
  opt_f(gen, "--angle", "angle", "Removed arc of the cut cylinder (radians)");
  opt_f(gen, "--size", "size", "Thin plate side length");
  opt_f(gen, "--thickness", "thickness", "Thin plate thickness");
  opt_f(gen, "--major-radius", "major_radius", "Torus major radius");
  opt_f(gen, "--minor-radius", "minor_radius", "Torus minor radius");

  geod.cmd = app.add_subcommand("geodesics",
                                "Build the k-NN graph and all-pairs Dijkstra matrix");
  add_common(geod);
  opt_str(geod, "--cloud", "cloud", "Input point cloud (.ply or .xyz)");
  opt_i(geod, "--k", "k", "Graph neighbor count (default 8)");

  fit.cmd = app.add_subcommand("fit", "Fit a lifted embedding network to one object");
  add_common(fit);
  opt_str(fit, "--cloud", "cloud", "Ground-truth cloud (unit-box normalized)");
  opt_str(fit, "--dm", "dm", "Geodesic distance matrix (GHOF-DM1)");
  opt_i(fit, "--k", "k", "Graph neighbor count for the soft-geodesic context");
  opt_i(fit, "--steps", "steps", "Training steps (default 5000)");
  opt_f(fit, "--learning-rate", "learning_rate", "Adam learning rate (default 1e-3)");
  opt_f(fit, "--lambda-c", "lambda_c", "Chamfer weight (default 1.0)");
  opt_f(fit, "--lambda-g", "lambda_g", "Geodesic weight (default 0.1)");
  opt_i(fit, "--pair-batch", "pair_batch", "Geodesic pairs per step (default 8192)");
  opt_i(fit, "--sample-batch", "sample_batch", "Ball samples per step (default 2048)");
  opt_u(fit, "--seed", "seed", "Training seed (default 1)");
  opt_i(fit, "--k-lambda", "k_lambda", "Soft-geodesic neighbor count (default 4)");
  opt_f(fit, "--bandwidth", "bandwidth", "RBF bandwidth; 0 = auto 1/h^2");
  opt_i(fit, "--lifting-dim", "lifting_dim", "Lifting dimensions K (default 16)");
  opt_i(fit, "--export-samples", "export_samples",
        "Points in the final embedding export (default 4096)");

  analyze.cmd =
      app.add_subcommand("analyze", "Evaluate a checkpoint against ground truth");
  add_common(analyze);
  opt_str(analyze, "--checkpoint", "checkpoint", "GHOF-NN1 checkpoint");
  opt_str(analyze, "--cloud", "cloud", "Ground-truth cloud");
  opt_str(analyze, "--dm", "dm", "Distance matrix for geodesic MRE (optional)");
  opt_i(analyze, "--k-normals", "k_normals", "Normal-estimation neighbors (default 16)");
  opt_i(analyze, "--charts", "charts", "K-means chart count; 0 = skip (default 0)");
  opt_i(analyze, "--eval-samples", "eval_samples", "Embedding samples (default 10000)");
  opt_i(analyze, "--eval-pairs", "eval_pairs", "Held-out geodesic pairs (default 1000)");
  opt_u(analyze, "--seed", "seed", "Evaluation seed (default 1)");

  mesh.cmd = app.add_subcommand("mesh", "Reconstruct an explicit chart mesh");
  add_common(mesh);
  opt_str(mesh, "--checkpoint", "checkpoint", "GHOF-NN1 checkpoint");
  opt_str(mesh, "--cloud", "cloud", "Ground-truth cloud for evaluation");
  opt_i(mesh, "--charts", "charts", "Chart count K_c (default 6)");
  opt_i(mesh, "--res", "res", "UV grid resolution per chart (default 12)");
  opt_i(mesh, "--chart-steps", "chart_steps", "Gradient steps per chart (default 100)");
  opt_i(mesh, "--samples", "samples", "Embedding points to chart (default 4096)");
  opt_i(mesh, "--eval-samples", "eval_samples", "Mesh surface samples (default 10000)");
  opt_u(mesh, "--seed", "seed", "Meshing seed (default 1)");

  auto* repro = app.add_subcommand("repro", "Run acceptance reproduction suites");
  std::string suite = "all";
  repro->add_option("suite", suite,
                    "Criterion name or 'all': sphere-oracle soft-exact gradients "
                    "pythagoras cut-fit thin-plate cube-charts mesh-pipeline "
                    "determinism");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ghof::set_max_threads(threads);
    if (gen.cmd->parsed()) return ghof::cmd_gen(effective(gen));
    if (geod.cmd->parsed()) return ghof::cmd_geodesics(effective(geod));
    if (fit.cmd->parsed()) return ghof::cmd_fit(effective(fit));
    if (analyze.cmd->parsed()) return ghof::cmd_analyze(effective(analyze));
    if (mesh.cmd->parsed()) return ghof::cmd_mesh(effective(mesh));
    if (repro->parsed()) {
      std::ostringstream captured;
      TeeBuf tee(std::cout.rdbuf(), captured.rdbuf());
      std::ostream out(&tee);
      int failures = ghof::repro::run_suite(suite, out);
      namespace fs = std::filesystem;
      const char* root = std::getenv("GHOF_OUT_ROOT");
      fs::path dir = ((root && *root) ? fs::path(root) : fs::path("runs")) / "repro";
      fs::create_directories(dir);
      std::ofstream summary(dir / "summary.txt", std::ios::binary);
      summary << captured.str();
      if (failures > 0) {
        std::cerr << failures << " criterion(s) failed\n";
        return 3;
      }
      return 0;
    }
  } catch (const ghof::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ghof::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
