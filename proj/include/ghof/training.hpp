#pragma once

#include <vector>

#include "ghof/losses.hpp"
#include "ghof/mlp.hpp"
#include "ghof/soft_geodesic.hpp"

namespace ghof {

struct TrainingConfig {
  std::int64_t steps = 5000;
  double learning_rate = 1e-3;  // desk-scale default; the paper's 1e-5 is selectable
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  LossWeights weights;
  std::int64_t pair_batch = 8192;
  std::int64_t sample_batch = 2048;
  std::uint64_t seed = 1;
  int k_lambda = 4;
  double bandwidth = 0.0;  // 0 = auto (1/h^2 from the graph)
  int lifting_dim = 16;
  std::vector<int> hidden = {256, 256, 256};

  std::vector<int> layer_sizes() const;
  void validate() const;
};

struct TrainResult {
  Mlp network;
  std::vector<LossReport> trace;
};

// Per-object fitting (Eq. 1 objective): each step resamples sample_batch unit
// ball points, forwards them, evaluates Chamfer against the cloud plus the
// geodesic loss on pair_batch ordered pairs with soft targets at the current
// predictions (targets constant within the step), then takes one Adam step.
// The cloud must be unit-box normalized and ctx must be built from it.
// Arithmetic is float32 with fixed-order reductions, so runs are
// bit-reproducible for a given config.
TrainResult fit_object(const PointCloud& cloud, const SoftGeodesicContext& ctx,
                       const TrainingConfig& config);

// Code-conditioned hypernetwork: theta(c) = G*c + g0, jointly optimized with
// the per-shape codes against the summed Eq. 1 objective.
struct HyperNetwork {
  int code_dim = 0;
  std::vector<int> sizes;
  Activation activation = Activation::leaky_relu;
  MatX G;                   // param_count x code_dim
  VecX g0;                  // param_count
  std::vector<VecX> codes;  // learned code per training shape

  Mlp materialize(const VecX& code) const;
  void validate() const;
};

struct HyperFitResult {
  HyperNetwork hyper;
  std::vector<LossReport> trace;  // summed over shapes, one per step
};

// freeze_codes holds the codes at their initial values, for the degenerate
// single-shape reduction to per-object fitting.
HyperFitResult hyper_fit(
    const std::vector<std::pair<const PointCloud*, const SoftGeodesicContext*>>& shapes,
    const TrainingConfig& config, int code_dim, bool freeze_codes = false);

}  // namespace ghof
