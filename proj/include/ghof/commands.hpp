#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ghof/common.hpp"
#include "ghof/config.hpp"

namespace ghof {

// Evaluation record written to report.json. Fields that a run did not compute
// stay NaN and serialize as null. chamfer_paper_units uses 1/10 of the longest
// ground-truth bounding-box side as the unit length.
struct EvalReport {
  double chamfer_raw = std::nan("");
  double chamfer_paper_units = std::nan("");
  double normal_consistency = std::nan("");
  double normal_euc = std::nan("");
  double normal_geo = std::nan("");
  double geodesic_mre = std::nan("");
  double chart_purity = std::nan("");
  std::uint64_t seed = 0;
  std::string config_hash;

  Json to_json() const;
};

double longest_bbox_side(const Mat3X& points);
double to_paper_units(double chamfer_raw, double longest_side);

// Subcommand entry points. Each resolves defaults, rejects unknown config
// keys, writes its artifacts plus config.json and run_meta.json into the
// output directory, and returns 0. Errors are reported by exception
// (validation_error / numerical_error), mapped to exit codes by the CLI.
int cmd_gen(const Json& config);
int cmd_geodesics(const Json& config);
int cmd_fit(const Json& config);
int cmd_analyze(const Json& config);
int cmd_mesh(const Json& config);

}  // namespace ghof
