#include "ghof/mlp.hpp"

#include <cstring>
#include <fstream>

namespace ghof {

LiftedEmbedding embed(const Mlp& net, const SampleSet& samples) {
  net.validate();
  if (net.in_dim() != 3 || net.out_dim() < 4)
    throw validation_error("embedding network must map R^3 to R^(3+K), K >= 1");
  MlpWorkspace<double> ws;
  LiftedEmbedding emb;
  emb.Z = forward(net, MatX(samples.samples), ws);
  return emb;
}

namespace {

template <typename S>
void save_network_impl(const std::string& path, const MlpT<S>& net) {
  net.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot write " + path);
  f.write("GHOF-NN1", 8);
  std::uint32_t count = std::uint32_t(net.sizes.size());
  f.write(reinterpret_cast<const char*>(&count), 4);
  for (int s : net.sizes) {
    std::uint32_t v = std::uint32_t(s);
    f.write(reinterpret_cast<const char*>(&v), 4);
  }
  std::vector<float> buf;
  for (int l = 0; l < net.layers(); ++l) {
    auto w = net.weight(l);
    buf.clear();
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) buf.push_back(float(w(r, c)));
    auto b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) buf.push_back(float(b[r]));
    f.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(4 * buf.size()));
  }
  if (!f) throw validation_error("write failed: " + path);
}

}  // namespace

void save_network(const std::string& path, const Mlp& net) {
  save_network_impl(path, net);
}

void save_network(const std::string& path, const MlpF& net) {
  save_network_impl(path, net);
}

Mlp load_network(const std::string& path, Activation activation) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot open " + path);
  char magic[8];
  if (!f.read(magic, 8) || std::memcmp(magic, "GHOF-NN1", 8) != 0)
    throw validation_error(path + ": bad magic, expected GHOF-NN1");
  std::uint32_t count = 0;
  if (!f.read(reinterpret_cast<char*>(&count), 4) || count < 2 || count > 64)
    throw validation_error(path + ": bad layer count");
  Mlp net;
  net.activation = activation;
  net.sizes.resize(count);
  for (auto& s : net.sizes) {
    std::uint32_t v = 0;
    if (!f.read(reinterpret_cast<char*>(&v), 4) || v == 0 || v > (1u << 20))
      throw validation_error(path + ": bad layer size");
    s = int(v);
  }
  net.params.resize(net.param_count());
  for (int l = 0; l < net.layers(); ++l) {
    std::vector<float> buf(std::size_t(net.sizes[l + 1]) * (net.sizes[l] + 1));
    if (!f.read(reinterpret_cast<char*>(buf.data()), std::streamsize(4 * buf.size())))
      throw validation_error(path + ": truncated parameter data");
    auto w = net.weight(l);
    std::size_t p = 0;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = buf[p++];
    auto b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = buf[p++];
  }
  char extra;
  if (f.read(&extra, 1)) throw validation_error(path + ": trailing bytes");
  net.validate();
  return net;
}

}  // namespace ghof
