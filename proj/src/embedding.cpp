#include "ghof/embedding.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace ghof {

void LiftedEmbedding::validate() const {
  if (Z.rows() < 4) throw validation_error("embedding needs at least one lifting dim");
  if (!Z.allFinite()) throw validation_error("embedding has non-finite values");
}

void write_embedding(const std::string& path, const LiftedEmbedding& emb) {
  emb.validate();
  std::ofstream f(path);
  if (!f) throw validation_error("cannot write " + path);
  for (Eigen::Index i = 0; i < emb.size(); ++i) {
    for (Eigen::Index r = 0; r < emb.Z.rows(); ++r) {
      if (r) f << ' ';
      f << format_double(emb.Z(r, i));
    }
    f << '\n';
  }
  if (!f) throw validation_error("write failed: " + path);
}

LiftedEmbedding read_embedding(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw validation_error("cannot open " + path);
  std::vector<double> vals;
  Eigen::Index rows = -1, n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ss(line);
    Eigen::Index c = 0;
    for (std::string t; ss >> t; ++c) vals.push_back(parse_double(t));
    if (c == 0) continue;
    if (rows == -1) {
      rows = c;
      if (rows < 4)
        throw validation_error(path + ": embedding rows need at least 4 columns");
    } else if (c != rows) {
      throw validation_error(path + ": line " + std::to_string(lineno) +
                             ": inconsistent column count");
    }
    ++n;
  }
  if (n == 0) throw validation_error(path + ": no rows");
  LiftedEmbedding emb;
  emb.Z = Eigen::Map<MatX>(vals.data(), rows, n);
  emb.validate();
  return emb;
}

}  // namespace ghof
