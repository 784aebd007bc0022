#include "ghof/cloud_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ghof {

namespace {

int parse_label(std::string_view s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw validation_error("bad label field: '" + std::string(s) + "'");
  return v;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream f(path, mode);
  if (!f) throw validation_error("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream f(path, mode);
  if (!f) throw validation_error("cannot write " + path);
  return f;
}

}  // namespace

PointCloud read_xyz(const std::string& path) {
  std::ifstream f = open_in(path, std::ios::in);
  std::vector<double> coords, nrms;
  std::vector<int> labels;
  int ncols = -1;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> tok;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    tok.clear();
    std::istringstream ss(line);
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (ncols == -1) {
      ncols = int(tok.size());
      if (ncols != 3 && ncols != 4 && ncols != 6 && ncols != 7)
        throw validation_error(path + ": line " + std::to_string(lineno) +
                               ": expected 3, 4, 6 or 7 columns");
    } else if (int(tok.size()) != ncols) {
      throw validation_error(path + ": line " + std::to_string(lineno) +
                             ": inconsistent column count");
    }
    for (int c = 0; c < 3; ++c) coords.push_back(parse_double(tok[c]));
    if (ncols >= 6)
      for (int c = 3; c < 6; ++c) nrms.push_back(parse_double(tok[c]));
    if (ncols == 4 || ncols == 7) labels.push_back(parse_label(tok.back()));
  }
  if (coords.empty()) throw validation_error(path + ": no points");
  PointCloud cloud;
  Eigen::Index n = Eigen::Index(coords.size() / 3);
  cloud.points = Eigen::Map<Mat3X>(coords.data(), 3, n);
  if (!nrms.empty()) cloud.normals = Eigen::Map<Mat3X>(nrms.data(), 3, n);
  cloud.labels = std::move(labels);
  cloud.validate();
  return cloud;
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
  cloud.validate();
  std::ofstream f = open_out(path, std::ios::out);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    f << format_double(cloud.points(0, i)) << ' ' << format_double(cloud.points(1, i))
      << ' ' << format_double(cloud.points(2, i));
    if (cloud.has_normals())
      for (int r = 0; r < 3; ++r) f << ' ' << format_double(cloud.normals(r, i));
    if (cloud.has_labels()) f << ' ' << cloud.labels[i];
    f << '\n';
  }
  if (!f) throw validation_error("write failed: " + path);
}

PointCloud read_ply(const std::string& path) {
  std::ifstream f = open_in(path, std::ios::binary);
  std::string line;
  if (!std::getline(f, line) || line != "ply")
    throw validation_error(path + ": not a PLY file");
  if (!std::getline(f, line) || line != "format binary_little_endian 1.0")
    throw validation_error(path + ": only binary little-endian PLY is supported");
  std::size_t n = 0;
  std::vector<std::string> props;
  while (std::getline(f, line)) {
    if (line == "end_header") break;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "comment") continue;
    if (word == "element") {
      std::string name;
      ss >> name >> n;
      if (name != "vertex")
        throw validation_error(path + ": unsupported element '" + name + "'");
    } else if (word == "property") {
      std::string type, name;
      ss >> type >> name;
      bool isf = type == "float" || type == "float32";
      bool isi = type == "int" || type == "int32";
      if ((name == "label" && !isi) || (name != "label" && !isf) || (!isf && !isi))
        throw validation_error(path + ": unsupported property '" + line + "'");
      props.push_back(name);
    } else {
      throw validation_error(path + ": unsupported header line '" + line + "'");
    }
  }
  bool has_normals = false, has_label = false;
  if (props.size() >= 3 && props[0] == "x" && props[1] == "y" && props[2] == "z") {
    std::size_t rest = 3;
    if (props.size() >= 6 && props[3] == "nx" && props[4] == "ny" && props[5] == "nz") {
      has_normals = true;
      rest = 6;
    }
    if (props.size() == rest + 1 && props[rest] == "label")
      has_label = true;
    else if (props.size() != rest)
      throw validation_error(path + ": unsupported property layout");
  } else {
    throw validation_error(path + ": unsupported property layout");
  }
  if (n == 0) throw validation_error(path + ": no points");
  PointCloud cloud;
  cloud.points.resize(3, Eigen::Index(n));
  if (has_normals) cloud.normals.resize(3, Eigen::Index(n));
  if (has_label) cloud.labels.resize(n);
  std::size_t row = 3 * 4 + (has_normals ? 12 : 0) + (has_label ? 4 : 0);
  std::vector<char> buf(row);
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.read(buf.data(), std::streamsize(row)))
      throw validation_error(path + ": truncated vertex data");
    float v[6];
    std::memcpy(v, buf.data(), has_normals ? 24 : 12);
    for (int r = 0; r < 3; ++r) cloud.points(r, Eigen::Index(i)) = v[r];
    if (has_normals)
      for (int r = 0; r < 3; ++r) cloud.normals(r, Eigen::Index(i)) = v[3 + r];
    if (has_label) {
      std::int32_t lab;
      std::memcpy(&lab, buf.data() + row - 4, 4);
      cloud.labels[i] = lab;
    }
  }
  cloud.validate();
  return cloud;
}

void write_ply(const std::string& path, const PointCloud& cloud) {
  cloud.validate();
  std::ofstream f = open_out(path, std::ios::binary);
  f << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size() << "\n"
    << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_normals())
    f << "property float nx\nproperty float ny\nproperty float nz\n";
  if (cloud.has_labels()) f << "property int label\n";
  f << "end_header\n";
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    float v[6];
    int nv = 3;
    for (int r = 0; r < 3; ++r) v[r] = float(cloud.points(r, i));
    if (cloud.has_normals()) {
      for (int r = 0; r < 3; ++r) v[3 + r] = float(cloud.normals(r, i));
      nv = 6;
    }
    f.write(reinterpret_cast<const char*>(v), nv * 4);
    if (cloud.has_labels()) {
      std::int32_t lab = cloud.labels[i];
      f.write(reinterpret_cast<const char*>(&lab), 4);
    }
  }
  if (!f) throw validation_error("write failed: " + path);
}

PointCloud read_cloud(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ply") == 0)
    return read_ply(path);
  return read_xyz(path);
}

void write_cloud(const std::string& path, const PointCloud& cloud) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ply") == 0)
    write_ply(path, cloud);
  else
    write_xyz(path, cloud);
}

}  // namespace ghof
