// SPDX-License-Identifier: Apache-2.0
//
// Shared scalar type, error reporting, and deterministic random streams.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace akplan {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat = Eigen::MatrixXd;

inline constexpr Scalar kPi = 3.14159265358979323846;

/// Broad failure categories carried by every library exception.
enum class ErrorKind {
  kInvalidShape,  // malformed geometry (non-convex polygon, radius <= 0, ...)
  kConfig,        // bad numeric parameter or dimension-free setting
  kDimension,     // vector length does not match the expected dof count
  kChain,         // kinematic connectivity problem (missing link, cycle, ...)
  kInvariant,     // internal consistency violation
  kSchema,        // malformed input file content
  kIo,            // file could not be read or written
  kInit,          // trajectory initialization failed (e.g. no base path)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

/// Deterministic random stream.
///
/// Wraps std::mt19937_64 (whose raw output sequence is pinned by the
/// standard) and derives all variates from raw 64-bit draws so results are
/// identical across platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(scramble(seed)) {}

  /// Raw 64-bit draw.
  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  Scalar uniform() {
    return static_cast<Scalar>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (inclusive). Requires lo <= hi.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  /// Independent child stream; the same (seed, stream) pair always yields
  /// the same sequence, regardless of draws taken from the parent.
  [[nodiscard]] Rng fork(std::uint64_t stream) const {
    return Rng(scramble(seed_ ^ scramble(stream + 0x9E3779B97F4A7C15ull)));
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t scramble(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace akplan
