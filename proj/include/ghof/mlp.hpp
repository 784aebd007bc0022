#pragma once

#include <string>
#include <vector>

#include "ghof/common.hpp"
#include "ghof/embedding.hpp"
#include "ghof/point_cloud.hpp"
#include "ghof/rng.hpp"

namespace ghof {

enum class Activation { leaky_relu, tanh };

// Fully-connected network with a linear output layer. Parameters live in one
// flat vector (per layer: W in column-major storage order, then b) so the
// optimizer and the hypernetwork can treat theta as a single vector.
template <typename S>
struct MlpT {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  std::vector<int> sizes;
  Activation activation = Activation::leaky_relu;
  // Kept in double for every scalar type so casting a network between
  // precisions never perturbs the slope hyperparameter.
  double leaky_slope = 0.01;
  Vec params;

  int layers() const { return int(sizes.size()) - 1; }
  int in_dim() const { return sizes.front(); }
  int out_dim() const { return sizes.back(); }

  Eigen::Index param_count() const {
    Eigen::Index c = 0;
    for (int l = 0; l < layers(); ++l)
      c += Eigen::Index(sizes[l + 1]) * (sizes[l] + 1);
    return c;
  }

  Eigen::Index layer_offset(int l) const {
    Eigen::Index c = 0;
    for (int t = 0; t < l; ++t) c += Eigen::Index(sizes[t + 1]) * (sizes[t] + 1);
    return c;
  }

  Eigen::Map<Mat> weight(int l) {
    return {params.data() + layer_offset(l), sizes[l + 1], sizes[l]};
  }
  Eigen::Map<const Mat> weight(int l) const {
    return {params.data() + layer_offset(l), sizes[l + 1], sizes[l]};
  }
  Eigen::Map<Vec> bias(int l) {
    return {params.data() + layer_offset(l) + Eigen::Index(sizes[l + 1]) * sizes[l],
            sizes[l + 1]};
  }
  Eigen::Map<const Vec> bias(int l) const {
    return {params.data() + layer_offset(l) + Eigen::Index(sizes[l + 1]) * sizes[l],
            sizes[l + 1]};
  }

  void validate() const {
    if (sizes.size() < 2) throw validation_error("network needs at least one layer");
    for (int s : sizes)
      if (s < 1) throw validation_error("layer sizes must be positive");
    if (params.size() != param_count())
      throw validation_error("parameter count does not match layer sizes");
    if (!params.allFinite()) throw validation_error("network has non-finite parameters");
  }

  template <typename T>
  MlpT<T> cast() const {
    MlpT<T> out;
    out.sizes = sizes;
    out.activation = activation;
    out.leaky_slope = leaky_slope;
    out.params = params.template cast<T>();
    return out;
  }
};

using Mlp = MlpT<double>;
using MlpF = MlpT<float>;

// Fan-in-scaled uniform init (each layer U(-1/sqrt(in), 1/sqrt(in)) for both
// weights and biases), deterministic per seed.
template <typename S>
MlpT<S> init_network(const std::vector<int>& sizes, Activation activation,
                     std::uint64_t seed) {
  MlpT<S> net;
  net.sizes = sizes;
  net.activation = activation;
  if (sizes.size() < 2) throw validation_error("network needs at least one layer");
  for (int s : sizes)
    if (s < 1) throw validation_error("layer sizes must be positive");
  net.params.resize(net.param_count());
  Rng rng(seed);
  for (int l = 0; l < net.layers(); ++l) {
    double bound = 1.0 / std::sqrt(double(sizes[l]));
    auto w = net.weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        w(r, c) = S(rng.uniform(-bound, bound));
    auto b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = S(rng.uniform(-bound, bound));
  }
  return net;
}

// Activations for layers 0..L; acts[0] is the input batch, acts[L] the output.
template <typename S>
struct MlpWorkspace {
  std::vector<typename MlpT<S>::Mat> acts;
  std::vector<typename MlpT<S>::Mat> deltas;
};

// input is in_dim x batch; returns ws.acts.back() (out_dim x batch).
template <typename S>
const typename MlpT<S>::Mat& forward(const MlpT<S>& net,
                                     const typename MlpT<S>::Mat& input,
                                     MlpWorkspace<S>& ws) {
  if (input.rows() != net.in_dim())
    throw validation_error("forward input dimension mismatch");
  int L = net.layers();
  ws.acts.resize(L + 1);
  ws.acts[0] = input;
  for (int l = 0; l < L; ++l) {
    auto& a = ws.acts[l + 1];
    a.noalias() = net.weight(l) * ws.acts[l];
    a.colwise() += net.bias(l);
    if (l + 1 < L) {
      if (net.activation == Activation::leaky_relu) {
        S slope = S(net.leaky_slope);
        a = a.unaryExpr([slope](S v) { return v > S(0) ? v : slope * v; });
      } else {
        a = a.array().tanh();
      }
    }
  }
  return ws.acts[L];
}

// d_out is the upstream gradient over the output batch; grad is resized to the
// flat parameter vector. A leaky slope > 0 keeps the sign of pre-activations,
// so the derivative is recovered from the stored post-activation values.
template <typename S>
void backward(const MlpT<S>& net, MlpWorkspace<S>& ws,
              const typename MlpT<S>::Mat& d_out, typename MlpT<S>::Vec& grad) {
  int L = net.layers();
  if (int(ws.acts.size()) != L + 1) throw validation_error("backward before forward");
  if (d_out.rows() != net.out_dim() || d_out.cols() != ws.acts[0].cols())
    throw validation_error("backward upstream shape mismatch");
  grad.resize(net.param_count());
  ws.deltas.resize(L);
  ws.deltas[L - 1] = d_out;
  for (int l = L - 1; l >= 0; --l) {
    const auto& delta = ws.deltas[l];
    Eigen::Index off = net.layer_offset(l);
    Eigen::Map<typename MlpT<S>::Mat> gw(grad.data() + off, net.sizes[l + 1],
                                         net.sizes[l]);
    Eigen::Map<typename MlpT<S>::Vec> gb(
        grad.data() + off + Eigen::Index(net.sizes[l + 1]) * net.sizes[l],
        net.sizes[l + 1]);
    gw.noalias() = delta * ws.acts[l].transpose();
    gb = delta.rowwise().sum();
    if (l == 0) break;
    auto& prev = ws.deltas[l - 1];
    prev.noalias() = net.weight(l).transpose() * delta;
    const auto& a = ws.acts[l];
    if (net.activation == Activation::leaky_relu) {
      S slope = S(net.leaky_slope);
      for (Eigen::Index c = 0; c < prev.cols(); ++c)
        for (Eigen::Index r = 0; r < prev.rows(); ++r)
          if (!(a(r, c) > S(0))) prev(r, c) *= slope;
    } else {
      prev.array() *= (S(1) - a.array().square());
    }
  }
}

// Maps unit-ball samples through a double-precision network with out_dim 3+K.
LiftedEmbedding embed(const Mlp& net, const SampleSet& samples);

// Checkpoint: magic "GHOF-NN1", u32 layer-size count, the sizes as u32, then
// per layer float32 weights row-major followed by float32 biases. The
// activation is not part of the binary; callers supply it on load.
void save_network(const std::string& path, const Mlp& net);
void save_network(const std::string& path, const MlpF& net);
Mlp load_network(const std::string& path,
                 Activation activation = Activation::leaky_relu);

}  // namespace ghof
