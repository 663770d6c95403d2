#pragma once

#include <cstddef>
#include <span>

namespace gemmlab {

/// Inverse of the standard normal CDF (Wichura's AS 241, PPND16), accurate to
/// about 1e-16 relative. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// Two-sided 95% critical value, normal_quantile(0.975).
inline constexpr double kZ975 = 1.959963984540054;

struct PowerParams {
  double alpha = 0.05;
  double power = 0.8;
  double effect_size = 0.5;
  double variance = 1.0;
};

/// Throws ConfigError when a field violates its range.
void validate(const PowerParams& params);

/// 2 * ((z_{1-alpha/2} + z_{power}) / effect_size)^2 * variance, before rounding.
double raw_sample_size(const PowerParams& params);

/// ceil(raw_sample_size(params)), never below 2.
std::size_t required_sample_size(const PowerParams& params);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divides by n - 1
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double ci95_half_width = 0.0;  // kZ975 * std_dev / sqrt(n)
};

/// Throws InsufficientDataError for fewer than two samples.
Summary summarize(std::span<const double> samples);

}  // namespace gemmlab
