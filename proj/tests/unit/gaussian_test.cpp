#include "gemmlab/gaussian.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "gemmlab/errors.hpp"

namespace gemmlab {
namespace {

TEST(BoxMullerTest, KnownValues) {
  // u1 = 0.5, u2 = 0.25: radius sqrt(2 ln 2), angle pi/2.
  const auto z = box_muller(0.5, 0.25);
  EXPECT_NEAR(z.z0, 0.0, 1e-15);
  EXPECT_NEAR(z.z1, 1.1774100225154747, 1e-15);

  const auto near_one = box_muller(std::nextafter(1.0, 0.0), 0.3);
  EXPECT_NEAR(near_one.z0, 0.0, 1e-7);
  EXPECT_NEAR(near_one.z1, 0.0, 1e-7);
}

TEST(BoxMullerTest, RadiusIdentity) {
  const auto z = box_muller(0.3, 0.7);
  EXPECT_NEAR(z.z0 * z.z0 + z.z1 * z.z1, 2.4079456086518722, 1e-12);

  RandomStream s(99);
  for (int i = 0; i < 10000; ++i) {
    const auto [u1, u2] = s.next_uniform_pair();
    const auto p = box_muller(u1, u2);
    ASSERT_NEAR(p.z0 * p.z0 + p.z1 * p.z1 + 2.0 * std::log(u1), 0.0, 1e-12);
  }
}

TEST(BoxMullerTest, RejectsClosedEndpoints) {
  EXPECT_THROW(box_muller(0.0, 0.5), DomainError);
  EXPECT_THROW(box_muller(1.0, 0.5), DomainError);
  EXPECT_THROW(box_muller(-0.1, 0.5), DomainError);
  EXPECT_THROW(box_muller(0.5, 0.0), DomainError);
  EXPECT_THROW(box_muller(0.5, 1.0), DomainError);
  EXPECT_THROW(box_muller(std::nan(""), 0.5), DomainError);
}

TEST(RandomStreamTest, UniformsStayInOpenInterval) {
  RandomStream s(1);
  for (int i = 0; i < 2'000'000; ++i) {
    const double u = s.next_uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStreamTest, SameSeedSameSequence) {
  RandomStream a(42);
  RandomStream b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_uniform_pair(), b.next_uniform_pair());
}

TEST(RandomStreamTest, KnownFirstOutputsArePortable) {
  // mt19937_64 is fully specified: its 10000th output for the default seed is
  // fixed by the standard. Our seed-5489 stream must reproduce that engine.
  std::mt19937_64 reference(5489);
  reference.discard(9999);
  EXPECT_EQ(reference(), 9981545732273789042ULL);
  RandomStream s(5489);
  std::mt19937_64 engine(5489);
  for (int i = 0; i < 10; ++i) {
    const double expected = (static_cast<double>(engine() >> 12) + 0.5) * 0x1p-52;
    EXPECT_EQ(s.next_uniform(), expected);
  }
}

TEST(RandomStreamTest, UniformMeanNearHalf) {
  RandomStream s(2024);
  double sum = 0.0;
  constexpr int kDraws = 1'000'000;
  for (int i = 0; i < kDraws; ++i) sum += s.next_uniform_pair().first;
  EXPECT_NEAR(sum / kDraws, 0.5, 0.005);
}

TEST(RandomStreamTest, GaussianPairIsCached) {
  RandomStream s(8);
  RandomStream raw(8);
  const auto [u1, u2] = raw.next_uniform_pair();
  const auto z = box_muller(u1, u2);
  EXPECT_EQ(s.next_gaussian(), z.z0);
  EXPECT_EQ(s.next_gaussian(), z.z1);
}

TEST(RandomMatrixTest, DeterministicPerSeed) {
  RandomStream a(7);
  RandomStream b(7);
  EXPECT_EQ(random_matrix(a, 4, 4), random_matrix(b, 4, 4));

  RandomStream c(7);
  RandomStream d(8);
  EXPECT_FALSE(random_matrix(c, 4, 4) == random_matrix(d, 4, 4));
}

TEST(RandomMatrixTest, FillsRowMajorFromStream) {
  RandomStream s(3);
  RandomStream t(3);
  const Matrix m = random_matrix(s, 3, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(m(i, j), t.next_gaussian());
  }
}

TEST(RandomMatrixTest, MomentsOfMillionSamples) {
  RandomStream s(7);
  const Matrix m = random_matrix(s, 1000, 1000);
  double sum = 0.0;
  for (double v : m.data()) sum += v;
  const double mean = sum / static_cast<double>(m.size());
  double sq = 0.0;
  for (double v : m.data()) sq += (v - mean) * (v - mean);
  const double variance = sq / static_cast<double>(m.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(variance, 1.0, 0.01);
  for (double v : m.data()) ASSERT_TRUE(std::isfinite(v));
}

TEST(RandomMatrixTest, RejectsZeroDimensions) {
  RandomStream s(1);
  EXPECT_THROW(random_matrix(s, 0, 3), DimensionError);
}

}  // namespace
}  // namespace gemmlab
