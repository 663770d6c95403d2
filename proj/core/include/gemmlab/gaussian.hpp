#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include "gemmlab/matrix.hpp"

namespace gemmlab {

struct GaussianPair {
  double z0;
  double z1;
};

/// Box-Muller transform of two uniforms on the open interval (0, 1):
///   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2).
/// Throws DomainError if either argument lies outside (0, 1).
GaussianPair box_muller(double u1, double u2);

/// Seeded stream of uniforms and standard normals.
///
/// The engine is std::mt19937_64, whose output sequence for a given seed is
/// fixed by the standard, so a seed names the same stream on every
/// platform. Uniforms are (k + 0.5) / 2^52 for a 52-bit k and therefore never
/// equal 0 or 1. Not safe for concurrent use.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  double next_uniform();
  std::pair<double, double> next_uniform_pair();

  /// Standard normal draw. Each Box-Muller evaluation yields two values; the
  /// second is cached and returned by the following call.
  double next_gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> cached_;
};

/// rows x cols matrix filled in row-major order with consecutive draws from
/// `stream.next_gaussian()`.
Matrix random_matrix(RandomStream& stream, std::size_t rows, std::size_t cols);

}  // namespace gemmlab
