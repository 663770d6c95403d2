#include "gemmlab/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gemmlab/errors.hpp"

namespace gemmlab {

GaussianPair box_muller(double u1, double u2) {
  if (!(u1 > 0.0 && u1 < 1.0)) {
    throw DomainError("box_muller: u1 must lie in (0, 1), got " + std::to_string(u1));
  }
  if (!(u2 > 0.0 && u2 < 1.0)) {
    throw DomainError("box_muller: u2 must lie in (0, 1), got " + std::to_string(u2));
  }
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double RandomStream::next_uniform() {
  constexpr double kScale = 0x1p-52;
  const std::uint64_t bits = engine_() >> 12;
  return (static_cast<double>(bits) + 0.5) * kScale;
}

std::pair<double, double> RandomStream::next_uniform_pair() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return {u1, u2};
}

double RandomStream::next_gaussian() {
  if (cached_) {
    const double z = *cached_;
    cached_.reset();
    return z;
  }
  const auto [u1, u2] = next_uniform_pair();
  const auto [z0, z1] = box_muller(u1, u2);
  cached_ = z1;
  return z0;
}

Matrix random_matrix(RandomStream& stream, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = stream.next_gaussian();
  return m;
}

}  // namespace gemmlab
