#include "gemmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gemmlab/errors.hpp"

namespace gemmlab {
namespace {

double poly(const double (&c)[8], double x) {
  double r = c[7];
  for (int i = 6; i >= 0; --i) r = r * x + c[i];
  return r;
}

// Coefficients of Wichura (1988), Applied Statistics algorithm AS 241.
constexpr double kA[8] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                          1.9715909503065514427e+3, 1.3731693765509461125e+4,
                          4.5921953931549871457e+4, 6.7265770927008700853e+4,
                          3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {1.0,
                          4.2313330701600911252e+1, 6.8718700749205790830e+2,
                          5.3941960214247511077e+3, 2.1213794301586595867e+4,
                          3.9307895800092710610e+4, 2.8729085735721942674e+4,
                          5.2264952788528545610e+3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                          5.76949722146069140550e0, 3.64784832476320460504e0,
                          1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0,
                          2.05319162663775882187e0, 1.67638483018380384940e0,
                          6.89767334985100004550e-1, 1.48103976427480074590e-1,
                          1.51986665636164571966e-2, 5.47593808499534494600e-4,
                          1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                          1.78482653991729133580e0, 2.96560571828504891230e-1,
                          2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,
                          5.99832206555887937690e-1, 1.36929880922735805310e-1,
                          1.48753612908506148525e-2, 7.86869131145613259100e-4,
                          1.84631831751005468180e-5, 1.42151175831644588870e-7,
                          2.04426310338993978564e-15};

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(kA, r) / poly(kB, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = poly(kC, r) / poly(kD, r);
  } else {
    r -= 5.0;
    value = poly(kE, r) / poly(kF, r);
  }
  return q < 0.0 ? -value : value;
}

void validate(const PowerParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(params.power > 0.0 && params.power < 1.0)) throw ConfigError("power must lie in (0, 1)");
  if (!(params.effect_size > 0.0) || !std::isfinite(params.effect_size)) {
    throw ConfigError("effect size must be positive");
  }
  if (!(params.variance >= 0.0) || !std::isfinite(params.variance)) {
    throw ConfigError("variance must be non-negative");
  }
}

double raw_sample_size(const PowerParams& params) {
  validate(params);
  const double z_alpha = normal_quantile(1.0 - params.alpha / 2.0);
  const double z_beta = normal_quantile(params.power);
  const double ratio = (z_alpha + z_beta) / params.effect_size;
  return 2.0 * ratio * ratio * params.variance;
}

std::size_t required_sample_size(const PowerParams& params) {
  const double n = std::ceil(raw_sample_size(params));
  return std::max<std::size_t>(2, static_cast<std::size_t>(n));
}

Summary summarize(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw InsufficientDataError("summary needs at least 2 samples, got " +
                                std::to_string(samples.size()));
  }
  // Summing in sorted order makes the result independent of sample order.
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  Summary s;
  s.n = sorted.size();
  const double count = static_cast<double>(s.n);
  double sum = 0.0;
  for (double x : sorted) sum += x;
  s.min = sorted.front();
  s.max = sorted.back();
  // Rounding can push the mean of near-constant data a hair outside [min, max].
  s.mean = std::clamp(sum / count, s.min, s.max);
  double squares = 0.0;
  for (double x : sorted) squares += (x - s.mean) * (x - s.mean);
  s.variance = squares / (count - 1.0);
  s.std_dev = std::sqrt(s.variance);
  s.ci95_half_width = kZ975 * s.std_dev / std::sqrt(count);
  return s;
}

}  // namespace gemmlab
