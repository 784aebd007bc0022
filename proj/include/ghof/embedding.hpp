#pragma once

#include <cmath>
#include <string>

#include "ghof/common.hpp"

namespace ghof {

// Lifted embedding rows z_i = [x_i; w_i] in R^(3+K), stored as one column per
// point. X is the point-coordinate view, W the lifting-coordinate view; the
// predicted geodesic ghat(i, j) = ||z_i - z_j|| is evaluated as
// sqrt(||dx||^2 + ||dw||^2), which makes ghat >= ||dx|| exact in floating
// point: adding the nonnegative ||dw||^2 never rounds below ||dx||^2, and
// sqrt is monotone.
struct LiftedEmbedding {
  MatX Z;  // (3+K) x n

  Eigen::Index size() const { return Z.cols(); }
  int lifting_dim() const { return int(Z.rows()) - 3; }

  auto X() const { return Z.topRows(3); }
  auto W() const { return Z.bottomRows(Z.rows() - 3); }

  double ghat(Eigen::Index i, Eigen::Index j) const {
    double dx2 = (Z.col(i).head<3>() - Z.col(j).head<3>()).squaredNorm();
    double dw2 =
        (Z.col(i).tail(Z.rows() - 3) - Z.col(j).tail(Z.rows() - 3)).squaredNorm();
    return std::sqrt(dx2 + dw2);
  }

  void validate() const;
};

// Text export, one row per point: x y z w_1 ... w_K. Shortest round-trip
// number formatting, so write -> read -> write is byte identical.
void write_embedding(const std::string& path, const LiftedEmbedding& emb);
LiftedEmbedding read_embedding(const std::string& path);

}  // namespace ghof
