#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "ghof/chart_mesh.hpp"
#include "ghof/cloud_io.hpp"
#include "ghof/commands.hpp"
#include "ghof/embedding.hpp"
#include "ghof/geodesics.hpp"
#include "ghof/mlp.hpp"

using namespace ghof;
namespace fs = std::filesystem;

namespace {

fs::path root() {
  fs::path p = fs::temp_directory_path() / "ghof_test_commands";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Json parse_file(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST_CASE("paper unit conversion") {
  CHECK(to_paper_units(0.0004, 1.0) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(to_paper_units(0.5, 2.0) == doctest::Approx(12.5).epsilon(1e-12));

  Mat3X P(3, 3);
  P << 0, 1, 0.5, 0, 0.25, 0, 0, 0, -0.5;
  CHECK(longest_bbox_side(P) == 1.0);
  CHECK_THROWS_AS(longest_bbox_side(Mat3X(3, 0)), validation_error);
  CHECK_THROWS_AS(longest_bbox_side(Mat3X::Zero(3, 2)), validation_error);
}

TEST_CASE("eval report serialization") {
  EvalReport rep;
  rep.seed = 42;
  rep.config_hash = "abc";
  Json j = rep.to_json();
  CHECK(j["chamfer_raw"].is_null());
  CHECK(j["normal_euc"].is_null());
  CHECK(j["chart_purity"].is_null());
  CHECK(j["seed"] == 42);
  CHECK(j["config_fnv1a64"] == "abc");

  rep.chamfer_raw = 1.5;
  rep.geodesic_mre = 0.07;
  j = rep.to_json();
  CHECK(j["chamfer_raw"] == 1.5);
  CHECK(j["geodesic_mre"] == 0.07);
}

TEST_CASE("command pipeline on a labeled cube") {
  fs::path r = root();
  std::string gen_out = (r / "gen").string();
  std::string geo_out = (r / "geo").string();
  std::string fit_out = (r / "fit").string();
  std::string an_out = (r / "analyze").string();
  std::string mesh_out = (r / "mesh").string();

  Json gen_cfg = {{"out", gen_out}, {"kind", "cube"}, {"n", 128}, {"seed", 3}};
  REQUIRE(cmd_gen(gen_cfg) == 0);
  std::string cloud_path = gen_out + "/cloud.ply";
  PointCloud cloud = read_cloud(cloud_path);
  CHECK(cloud.size() == 128);
  CHECK(cloud.has_labels());
  CHECK(cloud.has_normals());
  // Normalized by default.
  CHECK(longest_bbox_side(cloud.points) == doctest::Approx(1.0).epsilon(1e-6));

  SUBCASE("gen determinism and validation") {
    std::string bytes = slurp(cloud_path);
    REQUIRE(cmd_gen(gen_cfg) == 0);
    CHECK(slurp(cloud_path) == bytes);

    Json bad = gen_cfg;
    bad["kind"] = "pyramid";
    CHECK_THROWS_AS(cmd_gen(bad), validation_error);
    bad = gen_cfg;
    bad["bogus"] = 1;
    CHECK_THROWS_AS(cmd_gen(bad), validation_error);
    bad = gen_cfg;
    bad["format"] = "stl";
    CHECK_THROWS_AS(cmd_gen(bad), validation_error);

    Json xyz_cfg = {{"out", (r / "gen_xyz").string()},
                    {"kind", "sphere"},
                    {"n", 32},
                    {"seed", 1},
                    {"format", "xyz"}};
    REQUIRE(cmd_gen(xyz_cfg) == 0);
    CHECK(read_cloud((r / "gen_xyz" / "cloud.xyz").string()).size() == 32);
  }

  Json geo_cfg = {{"out", geo_out}, {"cloud", cloud_path}, {"k", 8}};
  REQUIRE(cmd_geodesics(geo_cfg) == 0);
  std::string dm_path = geo_out + "/geodesics.dm1";
  GeodesicMatrix D = load_geodesic_matrix(dm_path);
  CHECK(D.size() == 128);

  SUBCASE("geodesics summary") {
    Json s = parse_file(geo_out + "/summary.json");
    CHECK(s["n"] == 128);
    CHECK(s["k"] == 8);
    CHECK(s["bridges"] == 0);
    CHECK(s["mean_edge_length"].get<double>() > 0.0);
    CHECK(s["max_distance"].get<double>() >= s["min_distance"].get<double>());
    Json meta = parse_file(geo_out + "/run_meta.json");
    CHECK(meta["command"] == "geodesics");
    CHECK(meta["config_fnv1a64"].get<std::string>().size() == 16);
  }

  Json fit_cfg = {{"out", fit_out},
                  {"cloud", cloud_path},
                  {"dm", dm_path},
                  {"steps", 30},
                  {"sample_batch", 128},
                  {"hidden", {16, 16}},
                  {"lifting_dim", 4},
                  {"export_samples", 64},
                  {"seed", 5}};
  REQUIRE(cmd_fit(fit_cfg) == 0);

  SUBCASE("fit artifacts") {
    for (const char* name : {"network.nn1", "network.json", "trace.json",
                             "embedding.txt", "config.json", "run_meta.json"})
      CHECK(fs::exists(fs::path(fit_out) / name));

    Json trace = parse_file(fit_out + "/trace.json");
    REQUIRE(trace.is_array());
    REQUIRE(trace.size() == 30);
    CHECK(trace[0]["step"] == 0);
    CHECK(trace[29]["total"].get<double>() < trace[0]["total"].get<double>());
    CHECK(trace[0]["pairs"] == 128 * 127);

    Json sidecar = parse_file(fit_out + "/network.json");
    CHECK(sidecar["sizes"] == Json({3, 16, 16, 7}));
    CHECK(sidecar["activation"] == "leaky_relu");
    CHECK(sidecar["bandwidth_used"].get<double>() > 0.0);

    // The exported embedding is reproducible from the checkpoint alone.
    Mlp net = load_network(fit_out + "/network.nn1");
    LiftedEmbedding again = embed(net, sample_unit_ball(64, derive_seed(5, "export")));
    LiftedEmbedding stored = read_embedding(fit_out + "/embedding.txt");
    CHECK(stored.Z == again.Z);
  }

  SUBCASE("fit validation") {
    CHECK_THROWS_AS(cmd_fit(Json{{"dm", dm_path}}), validation_error);
    Json bad = fit_cfg;
    bad["steps"] = 0;
    CHECK_THROWS_AS(cmd_fit(bad), validation_error);

    Json small = {{"out", (r / "gen_small").string()},
                  {"kind", "sphere"},
                  {"n", 64},
                  {"seed", 1}};
    REQUIRE(cmd_gen(small) == 0);
    Json mismatch = fit_cfg;
    mismatch["cloud"] = (r / "gen_small" / "cloud.ply").string();
    CHECK_THROWS_AS(cmd_fit(mismatch), validation_error);
  }

  SUBCASE("lambda_g zero shows up in the trace") {
    Json ab = fit_cfg;
    ab["out"] = (r / "fit_ablate").string();
    ab["lambda_g"] = 0.0;
    ab["steps"] = 5;
    REQUIRE(cmd_fit(ab) == 0);
    Json trace = parse_file(ab["out"].get<std::string>() + "/trace.json");
    for (const Json& e : trace) {
      CHECK(e["geodesic"].get<double>() > 0.0);
      CHECK(e["total"] == e["chamfer"]);
    }
  }

  Json an_cfg = {{"out", an_out},          {"checkpoint", fit_out + "/network.nn1"},
                 {"cloud", cloud_path},    {"dm", dm_path},
                 {"k_normals", 8},         {"charts", 3},
                 {"eval_samples", 1500},   {"eval_pairs", 200},
                 {"seed", 2}};
  REQUIRE(cmd_analyze(an_cfg) == 0);

  SUBCASE("analyze report") {
    Json rep = parse_file(an_out + "/report.json");
    double raw = rep["chamfer_raw"].get<double>();
    double paper = rep["chamfer_paper_units"].get<double>();
    double side = rep["longest_side"].get<double>();
    CHECK(raw > 0.0);
    double unit = 0.1 * side;
    CHECK(paper == doctest::Approx(raw / (unit * unit)).epsilon(1e-9));
    CHECK(rep["normal_euc"].is_number());
    CHECK(rep["normal_geo"].is_number());
    CHECK(rep["normal_euc"].get<double>() >= 0.0);
    CHECK(rep["normal_euc"].get<double>() <= 1.0);
    CHECK(rep["geodesic_mre"].is_number());
    CHECK(rep["geodesic_pairs_used"] == 200);
    CHECK(rep["chart_purity"].is_number());
    CHECK(rep["chart_purity"].get<double>() > 0.0);
    CHECK(rep["chart_purity"].get<double>() <= 1.0);
    CHECK(rep["seed"] == 2);
    for (const char* name : {"charts.xyz", "pred_normals_euc.xyz", "pred_normals_geo.xyz"})
      CHECK(fs::exists(fs::path(an_out) / name));
    PointCloud charts = read_xyz(an_out + "/charts.xyz");
    CHECK(charts.has_labels());
    CHECK(charts.size() == 1500);

    // Reports are byte-stable across reruns.
    std::string bytes = slurp(an_out + "/report.json");
    REQUIRE(cmd_analyze(an_cfg) == 0);
    CHECK(slurp(an_out + "/report.json") == bytes);
  }

  SUBCASE("analyze without optional inputs") {
    Json plain = {{"out", (r / "analyze_plain").string()},
                  {"checkpoint", fit_out + "/network.nn1"},
                  {"cloud", cloud_path},
                  {"eval_samples", 200},
                  {"seed", 2}};
    REQUIRE(cmd_analyze(plain) == 0);
    Json rep = parse_file((r / "analyze_plain" / "report.json").string());
    CHECK(rep["chamfer_raw"].is_number());
    CHECK(rep["geodesic_mre"].is_null());
    CHECK(rep["chart_purity"].is_null());
    CHECK(rep["normal_euc"].is_number());  // the cube cloud carries normals
  }

  SUBCASE("mesh command") {
    Json mesh_cfg = {{"out", mesh_out},
                     {"checkpoint", fit_out + "/network.nn1"},
                     {"cloud", cloud_path},
                     {"charts", 2},
                     {"res", 4},
                     {"chart_steps", 15},
                     {"samples", 400},
                     {"eval_samples", 400},
                     {"seed", 4}};
    REQUIRE(cmd_mesh(mesh_cfg) == 0);
    Json rep = parse_file(mesh_out + "/report.json");
    int fitted = rep["charts_fitted"].get<int>();
    CHECK(fitted >= 1);
    CHECK(rep["vertices"] == 16 * fitted);
    CHECK(rep["faces"].get<int>() > 0);
    CHECK(rep["chamfer_raw"].is_number());
    CHECK(rep["chamfer_embed"].is_number());
    CHECK(rep["normal_consistency"].is_number());
    TriangleMesh m = read_obj(mesh_out + "/mesh.obj");
    CHECK(m.vertices.cols() == rep["vertices"].get<int>());
    CHECK(m.face_count() == rep["faces"].get<int>());

    Json bad = mesh_cfg;
    bad["res"] = 1;
    CHECK_THROWS_AS(cmd_mesh(bad), validation_error);
  }
}
