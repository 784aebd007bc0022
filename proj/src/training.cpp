#include "ghof/training.hpp"

#include <cmath>
#include <limits>

#include "ghof/adam.hpp"
#include "ghof/parallel.hpp"

namespace ghof {

namespace {

using MatF = Eigen::MatrixXf;
using VecF = Eigen::VectorXf;

constexpr Eigen::Index kColChunk = 256;
constexpr Eigen::Index kPairChunk = 1024;
constexpr int kMaxLambda = 32;

// One object's training state: float32 copies of the ground truth, scratch
// buffers, and the per-step loss/gradient evaluation. All reductions run over
// a fixed chunk grid and merge in chunk order, so the result is independent
// of the worker count.
struct StepEngine {
  MatF Y;    // 3 x n ground-truth points (identical to the graph vertices)
  MatF Yt;   // n x 3, for the distance GEMM
  VecF Yn2;  // squared norms of Y columns
  MatF Df;   // n x n float geodesic matrix
  int k_lambda = 4;
  float bandwidth = 1.0f;
  LossWeights weights;
  Eigen::Index n = 0, B = 0, pair_batch = 0;

  MatF X;    // 3 x B ball samples
  MatF S;    // n x B dot products
  VecF Xn2;
  MatF lam_d2;
  Eigen::MatrixXi lam_idx;
  MatF wsoft;
  Eigen::Index nchunks = 0;
  std::vector<float> part_min;
  std::vector<int> part_arg;
  std::vector<float> min_d2;
  std::vector<int> min_arg;
  std::vector<Eigen::Index> pair_i, pair_j;
  std::vector<float> pair_r, pair_d, pair_g;
  MatF gZ;
  MlpWorkspace<float> mws;

  void init(const PointCloud& cloud, const SoftGeodesicContext& ctx,
            const TrainingConfig& config) {
    ctx.validate();
    cloud.validate();
    if (ctx.graph->vertices.cols() != cloud.points.cols() ||
        !(ctx.graph->vertices.array() == cloud.points.array()).all())
      throw validation_error("soft geodesic context must be built from the training cloud");
    Vec3 ext = cloud.points.rowwise().maxCoeff() - cloud.points.rowwise().minCoeff();
    double longest = ext.maxCoeff();
    if (std::abs(longest - 1.0) > 0.1)
      throw validation_error("training cloud must be normalized to the unit box");
    if (ctx.k_lambda != config.k_lambda)
      throw validation_error("config k_lambda disagrees with the context");
    if (config.bandwidth > 0.0 &&
        std::abs(config.bandwidth - ctx.bandwidth) > 1e-9 * ctx.bandwidth)
      throw validation_error("config bandwidth disagrees with the context");
    if (ctx.k_lambda > kMaxLambda) throw validation_error("k_lambda is too large");

    n = cloud.size();
    B = config.sample_batch;
    pair_batch = config.pair_batch;
    k_lambda = ctx.k_lambda;
    bandwidth = float(ctx.bandwidth);
    weights = config.weights;

    Y = cloud.points.cast<float>();
    Yt = Y.transpose();
    Yn2 = Y.colwise().squaredNorm();
    Df = ctx.D->distances.cast<float>();

    X.resize(3, B);
    S.resize(n, B);
    Xn2.resize(B);
    lam_d2.resize(k_lambda, B);
    lam_idx.resize(k_lambda, B);
    wsoft.resize(k_lambda, B);
    nchunks = (B + kColChunk - 1) / kColChunk;
    part_min.resize(std::size_t(nchunks) * n);
    part_arg.resize(std::size_t(nchunks) * n);
    min_d2.resize(n);
    min_arg.resize(n);
  }

  void sample_pairs(Rng& pair_rng, double* out_scale) {
    pair_i.clear();
    pair_j.clear();
    double full = double(B) * double(B - 1);
    if (B <= 1 || full == 0.0) {
      *out_scale = 1.0;
      return;
    }
    if (B <= 1024) {
      pair_i.reserve(std::size_t(full));
      pair_j.reserve(std::size_t(full));
      for (Eigen::Index i = 0; i < B; ++i)
        for (Eigen::Index j = 0; j < B; ++j)
          if (i != j) {
            pair_i.push_back(i);
            pair_j.push_back(j);
          }
      *out_scale = 1.0;
      return;
    }
    pair_i.reserve(pair_batch);
    pair_j.reserve(pair_batch);
    for (Eigen::Index t = 0; t < pair_batch; ++t) {
      Eigen::Index i = Eigen::Index(pair_rng.uniform_index(std::uint64_t(B)));
      Eigen::Index j;
      do {
        j = Eigen::Index(pair_rng.uniform_index(std::uint64_t(B)));
      } while (j == i);
      pair_i.push_back(i);
      pair_j.push_back(j);
    }
    *out_scale = full / double(pair_batch);
  }

  // Loss and d(total)/d(embedding) at the current parameters. grad receives
  // d(total)/d(theta).
  LossReport step(const MlpT<float>& net, Rng& ball_rng, Rng& pair_rng, VecF& grad) {
    for (Eigen::Index i = 0; i < B; ++i) X.col(i) = ball_rng.ball_point().cast<float>();

    const MatF& Z = forward(net, X, mws);
    Xn2 = Z.topRows(3).colwise().squaredNorm();

    int k = k_lambda;
    parallel_for(B, kColChunk, [&](Eigen::Index b, Eigen::Index e) {
      Eigen::Index chunk = b / kColChunk;
      S.middleCols(b, e - b).noalias() = Yt * Z.topRows(3).middleCols(b, e - b);
      float* pmin = part_min.data() + std::size_t(chunk) * n;
      int* parg = part_arg.data() + std::size_t(chunk) * n;
      std::fill(pmin, pmin + n, std::numeric_limits<float>::infinity());
      std::fill(parg, parg + n, -1);
      float bd[kMaxLambda];
      int bi[kMaxLambda];
      for (Eigen::Index j = b; j < e; ++j) {
        float xn = Xn2[j];
        for (int t = 0; t < k; ++t) {
          bd[t] = std::numeric_limits<float>::infinity();
          bi[t] = -1;
        }
        const float* scol = &S(0, j);
        const float* yn = Yn2.data();
        for (Eigen::Index t = 0; t < n; ++t) {
          float d2 = yn[t] + xn - 2.0f * scol[t];
          if (d2 < 0.0f) d2 = 0.0f;
          if (d2 < pmin[t]) {
            pmin[t] = d2;
            parg[t] = int(j);
          }
          if (d2 < bd[k - 1]) {
            int p = k - 1;
            while (p > 0 && bd[p - 1] > d2) {
              bd[p] = bd[p - 1];
              bi[p] = bi[p - 1];
              --p;
            }
            bd[p] = d2;
            bi[p] = int(t);
          }
        }
        for (int t = 0; t < k; ++t) {
          lam_d2(t, j) = bd[t];
          lam_idx(t, j) = bi[t];
        }
      }
    });

    for (Eigen::Index t = 0; t < n; ++t) {
      min_d2[t] = part_min[t];
      min_arg[t] = part_arg[t];
    }
    for (Eigen::Index c = 1; c < nchunks; ++c) {
      const float* pmin = part_min.data() + std::size_t(c) * n;
      const int* parg = part_arg.data() + std::size_t(c) * n;
      for (Eigen::Index t = 0; t < n; ++t)
        if (pmin[t] < min_d2[t]) {
          min_d2[t] = pmin[t];
          min_arg[t] = parg[t];
        }
    }

    double sum1 = 0.0, sum2 = 0.0;
    for (Eigen::Index j = 0; j < B; ++j) sum1 += double(lam_d2(0, j));
    for (Eigen::Index t = 0; t < n; ++t) sum2 += double(min_d2[t]);
    double chamfer_val = sum1 / double(B) + sum2 / double(n);

    gZ.setZero(Z.rows(), B);
    float fc1 = float(weights.lambda_c * 2.0 / double(B));
    for (Eigen::Index j = 0; j < B; ++j)
      gZ.col(j).head<3>() =
          fc1 * (Z.col(j).head<3>() - Y.col(lam_idx(0, j)));
    float fc2 = float(weights.lambda_c * 2.0 / double(n));
    for (Eigen::Index t = 0; t < n; ++t) {
      Eigen::Index j = min_arg[t];
      gZ.col(j).head<3>() += fc2 * (Z.col(j).head<3>() - Y.col(t));
    }

    for (Eigen::Index j = 0; j < B; ++j) {
      float mx = -std::numeric_limits<float>::infinity();
      for (int t = 0; t < k; ++t) mx = std::max(mx, -bandwidth * lam_d2(t, j));
      float sum = 0.0f;
      for (int t = 0; t < k; ++t) {
        float w = std::exp(-bandwidth * lam_d2(t, j) - mx);
        wsoft(t, j) = w;
        sum += w;
      }
      for (int t = 0; t < k; ++t) wsoft(t, j) /= sum;
    }

    double scale = 1.0;
    sample_pairs(pair_rng, &scale);
    Eigen::Index m = Eigen::Index(pair_i.size());
    pair_r.resize(m);
    pair_d.resize(m);
    pair_g.resize(m);
    parallel_for(m, kPairChunk, [&](Eigen::Index b, Eigen::Index e) {
      for (Eigen::Index t = b; t < e; ++t) {
        Eigen::Index i = pair_i[t], j = pair_j[t];
        float g = 0.0f;
        for (int p = 0; p < k; ++p) {
          float row = 0.0f;
          for (int q = 0; q < k; ++q)
            row += wsoft(q, j) * Df(lam_idx(p, i), lam_idx(q, j));
          g += wsoft(p, i) * row;
        }
        float d = (Z.col(i) - Z.col(j)).norm();
        pair_g[t] = g;
        pair_d[t] = d;
        pair_r[t] = d - g;
      }
    });

    double pair_sum = 0.0;
    double inv_b2 = B > 0 ? 1.0 / (double(B) * double(B)) : 0.0;
    float fg = float(weights.lambda_g * scale * inv_b2);
    for (Eigen::Index t = 0; t < m; ++t) {
      pair_sum += double(pair_r[t]) * double(pair_r[t]);
      if (pair_d[t] == 0.0f) continue;
      float c = fg * 2.0f * pair_r[t] / pair_d[t];
      Eigen::Index i = pair_i[t], j = pair_j[t];
      for (Eigen::Index r = 0; r < Z.rows(); ++r) {
        float dz = c * (Z(r, i) - Z(r, j));
        gZ(r, i) += dz;
        gZ(r, j) -= dz;
      }
    }
    double geo_val = pair_sum * scale * inv_b2;

    backward(net, mws, gZ, grad);

    LossReport rep;
    rep.chamfer = chamfer_val;
    rep.geodesic = geo_val;
    rep.total = weights.lambda_c * rep.chamfer + weights.lambda_g * rep.geodesic;
    rep.pair_count = m;
    return rep;
  }
};

void check_finite(const LossReport& rep, std::int64_t step) {
  if (!std::isfinite(rep.total) || !std::isfinite(rep.chamfer) ||
      !std::isfinite(rep.geodesic))
    throw numerical_error("training diverged at step " + std::to_string(step) +
                          " (total=" + format_double(rep.total) + ")");
}

}  // namespace

std::vector<int> TrainingConfig::layer_sizes() const {
  std::vector<int> s;
  s.reserve(hidden.size() + 2);
  s.push_back(3);
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(3 + lifting_dim);
  return s;
}

void TrainingConfig::validate() const {
  if (steps < 1) throw validation_error("steps must be >= 1");
  if (!(learning_rate > 0.0)) throw validation_error("learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw validation_error("adam betas must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw validation_error("adam_epsilon must be positive");
  weights.validate();
  if (pair_batch < 1) throw validation_error("pair_batch must be >= 1");
  if (sample_batch < 1) throw validation_error("sample_batch must be >= 1");
  if (k_lambda < 1 || k_lambda > kMaxLambda)
    throw validation_error("k_lambda out of range");
  if (bandwidth < 0.0) throw validation_error("bandwidth must be >= 0");
  if (lifting_dim < 1) throw validation_error("lifting_dim must be >= 1");
  for (int h : hidden)
    if (h < 1) throw validation_error("hidden sizes must be positive");
}

TrainResult fit_object(const PointCloud& cloud, const SoftGeodesicContext& ctx,
                       const TrainingConfig& config) {
  config.validate();
  StepEngine engine;
  engine.init(cloud, ctx, config);

  MlpF net = init_network<float>(config.layer_sizes(), Activation::leaky_relu,
                                 derive_seed(config.seed, "init"));
  AdamState<float> adam;
  adam.lr = float(config.learning_rate);
  adam.beta1 = float(config.adam_beta1);
  adam.beta2 = float(config.adam_beta2);
  adam.eps = float(config.adam_epsilon);
  adam.reset(net.params.size());

  Rng ball_rng(derive_seed(config.seed, "ball"));
  Rng pair_rng(derive_seed(config.seed, "pairs"));

  TrainResult result;
  result.trace.reserve(config.steps);
  VecF grad;
  for (std::int64_t s = 0; s < config.steps; ++s) {
    LossReport rep = engine.step(net, ball_rng, pair_rng, grad);
    check_finite(rep, s);
    adam.step(net.params, grad);
    result.trace.push_back(rep);
  }
  result.network = net.cast<double>();
  return result;
}

Mlp HyperNetwork::materialize(const VecX& code) const {
  validate();
  if (code.size() != code_dim) throw validation_error("code dimension mismatch");
  Mlp net;
  net.sizes = sizes;
  net.activation = activation;
  net.params = G * code + g0;
  return net;
}

void HyperNetwork::validate() const {
  if (code_dim < 1) throw validation_error("code_dim must be >= 1");
  if (sizes.size() < 2) throw validation_error("hypernetwork target sizes invalid");
  Mlp probe;
  probe.sizes = sizes;
  Eigen::Index count = probe.param_count();
  if (G.rows() != count || G.cols() != code_dim || g0.size() != count)
    throw validation_error("hypernetwork generator shape mismatch");
}

HyperFitResult hyper_fit(
    const std::vector<std::pair<const PointCloud*, const SoftGeodesicContext*>>& shapes,
    const TrainingConfig& config, int code_dim, bool freeze_codes) {
  config.validate();
  if (shapes.empty()) throw validation_error("hyper_fit needs at least one shape");
  if (code_dim < 1) throw validation_error("code_dim must be >= 1");

  std::vector<StepEngine> engines(shapes.size());
  for (std::size_t s = 0; s < shapes.size(); ++s)
    engines[s].init(*shapes[s].first, *shapes[s].second, config);

  std::vector<int> sizes = config.layer_sizes();
  MlpF proto = init_network<float>(sizes, Activation::leaky_relu,
                                   derive_seed(config.seed, "g0"));
  Eigen::Index P = proto.param_count();
  Eigen::Index S = Eigen::Index(shapes.size());
  Eigen::Index C = code_dim;

  // Flat hyper parameter vector: vec(G), then g0, then the codes.
  VecF params(P * C + P + S * C);
  {
    Rng rng(derive_seed(config.seed, "G"));
    float bound = float(0.01 / std::sqrt(double(C)));
    for (Eigen::Index t = 0; t < P * C; ++t)
      params[t] = float(rng.uniform(-bound, bound));
    params.segment(P * C, P) = proto.params;
    Rng crng(derive_seed(config.seed, "codes"));
    for (Eigen::Index s = 0; s < S; ++s)
      for (Eigen::Index c = 0; c < C; ++c) params[P * C + P + s * C + c] = float(crng.normal());
  }

  AdamState<float> adam;
  adam.lr = float(config.learning_rate);
  adam.beta1 = float(config.adam_beta1);
  adam.beta2 = float(config.adam_beta2);
  adam.eps = float(config.adam_epsilon);
  adam.reset(params.size());

  std::vector<Rng> ball_rngs, pair_rngs;
  for (Eigen::Index s = 0; s < S; ++s) {
    ball_rngs.emplace_back(derive_seed(config.seed, "ball" + std::to_string(s)));
    pair_rngs.emplace_back(derive_seed(config.seed, "pairs" + std::to_string(s)));
  }

  MlpF net = proto;
  VecF grad(params.size()), theta_grad;
  HyperFitResult result;
  result.trace.reserve(config.steps);
  for (std::int64_t step_no = 0; step_no < config.steps; ++step_no) {
    Eigen::Map<MatF> G(params.data(), P, C);
    Eigen::Map<VecF> g0(params.data() + P * C, P);
    grad.setZero();
    Eigen::Map<MatF> dG(grad.data(), P, C);
    Eigen::Map<VecF> dg0(grad.data() + P * C, P);
    LossReport total;
    for (Eigen::Index s = 0; s < S; ++s) {
      Eigen::Map<VecF> code(params.data() + P * C + P + s * C, C);
      Eigen::Map<VecF> dcode(grad.data() + P * C + P + s * C, C);
      net.params.noalias() = G * code;
      net.params += g0;
      LossReport rep = engines[s].step(net, ball_rngs[s], pair_rngs[s], theta_grad);
      check_finite(rep, step_no);
      dG.noalias() += theta_grad * code.transpose();
      dg0 += theta_grad;
      if (!freeze_codes) dcode.noalias() = G.transpose() * theta_grad;
      total.chamfer += rep.chamfer;
      total.geodesic += rep.geodesic;
      total.total += rep.total;
      total.pair_count += rep.pair_count;
    }
    adam.step(params, grad);
    result.trace.push_back(total);
  }

  result.hyper.code_dim = code_dim;
  result.hyper.sizes = sizes;
  result.hyper.activation = Activation::leaky_relu;
  Eigen::Map<MatF> G(params.data(), P, C);
  Eigen::Map<VecF> g0(params.data() + P * C, P);
  result.hyper.G = G.cast<double>();
  result.hyper.g0 = g0.cast<double>();
  for (Eigen::Index s = 0; s < S; ++s) {
    Eigen::Map<VecF> code(params.data() + P * C + P + s * C, C);
    result.hyper.codes.push_back(code.cast<double>());
  }
  return result;
}

}  // namespace ghof
