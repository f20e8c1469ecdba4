#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace markit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error taxonomy. Each class maps onto one C API status code.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method { Proj, Lse, Mle };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

void require_finite(const Matrix& m, const char* what);

// Deterministic seed derivation for independent random purposes (model draw,
// covariance draw, ...) that must not collide with per-replication streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace markit
