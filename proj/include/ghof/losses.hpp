#pragma once

#include <cstdint>
#include <vector>

#include "ghof/common.hpp"

namespace ghof {

// Eq. 1 weights; defaults lambda_C = 1.0, lambda_G = 0.1.
struct LossWeights {
  double lambda_c = 1.0;
  double lambda_g = 0.1;

  void validate() const;
};

struct LossReport {
  double chamfer = 0.0;
  double geodesic = 0.0;
  double total = 0.0;
  std::int64_t pair_count = 0;
};

// Ordered pair (i, j) with its soft geodesic target g.
struct PairTarget {
  Eigen::Index i;
  Eigen::Index j;
  double g;
};

// Eq. 2: (1/|X|) sum_x min_y ||x-y||^2 + (1/|Y|) sum_y min_x ||y-x||^2.
double chamfer(const Mat3X& X, const Mat3X& Y);

// Gradient of chamfer with respect to X; argmin ties broken by lowest index.
Mat3X chamfer_grad(const Mat3X& X, const Mat3X& Y);

// Eq. 3 over the supplied ordered pairs: (1/n^2) sum (||z_i - z_j|| - g)^2
// with n = Z.cols(). Supplying the full ordered off-diagonal set gives
// exactly Eq. 3 with zero diagonal contribution.
double geodesic_loss(const MatX& Z, const std::vector<PairTarget>& targets);

// Gradient with respect to every embedding column; coincident pairs
// (||z_i - z_j|| = 0) take subgradient 0.
MatX geodesic_loss_grad(const MatX& Z, const std::vector<PairTarget>& targets);

// Eq. 1 report; X_pred must be the point-coordinate view of Z.
LossReport total_loss(const Mat3X& X_pred, const Mat3X& Y_gt, const MatX& Z,
                      const std::vector<PairTarget>& targets, const LossWeights& weights);

}  // namespace ghof
