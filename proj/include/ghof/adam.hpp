#pragma once

#include <cstdint>

#include "ghof/common.hpp"

namespace ghof {

// Canonical Adam with bias correction, over a flat parameter vector.
template <typename S>
struct AdamState {
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  S lr = S(1e-3);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S eps = S(1e-8);
  std::int64_t t = 0;
  Vec m, v;

  void reset(Eigen::Index n) {
    m = Vec::Zero(n);
    v = Vec::Zero(n);
    t = 0;
  }

  void step(Vec& params, const Vec& grad) {
    if (m.size() != params.size() || grad.size() != params.size())
      throw validation_error("adam state size mismatch");
    ++t;
    m = beta1 * m + (S(1) - beta1) * grad;
    v = beta2 * v + (S(1) - beta2) * grad.cwiseProduct(grad);
    S c1 = S(1) - S(std::pow(double(beta1), double(t)));
    S c2 = S(1) - S(std::pow(double(beta2), double(t)));
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

}  // namespace ghof
