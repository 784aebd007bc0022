#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ghof {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;

// Bad inputs, bad config, malformed files. CLI exit code 1.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Divergence, NaN, numerically impossible state. CLI exit code 2.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest representation that parses back to the same double. Used for all
// text artifacts so that write -> read -> write is byte identical.
std::string format_double(double v);
double parse_double(std::string_view s);

// FNV-1a, used for config fingerprints in reports.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace ghof
