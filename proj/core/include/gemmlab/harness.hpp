#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gemmlab/kernels.hpp"
#include "gemmlab/matrix.hpp"
#include "gemmlab/stats.hpp"

namespace gemmlab {

/// Problem shape: A is m x n, B is n x p, C is m x p.
struct Shape {
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t p = 1;

  static Shape square(std::size_t size) { return {size, size, size}; }
  bool is_square() const noexcept { return m == n && n == p; }

  friend bool operator==(const Shape&, const Shape&) = default;
  friend auto operator<=>(const Shape&, const Shape&) = default;
};

/// "64" for square shapes, "m:n:p" otherwise.
std::string describe(const Shape& s);
/// Accepts "n" or "m:n:p"; throws ConfigError.
Shape parse_shape(const std::string& text);

struct Configuration {
  Shape size;
  KernelVariant variant;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

enum class SeedRole : std::uint64_t { a = 1, b = 2 };

/// Seed for one input matrix: a splitmix64 chain over (base, m, n, p, kind,
/// tile, workers, role, generation). Generation 0 is the per-configuration
/// input; generation r + 1 is used for repetition r when inputs are
/// regenerated every repetition.
std::uint64_t derive_seed(std::uint64_t base, const Shape& size, const KernelVariant& variant,
                          SeedRole role, std::uint64_t generation = 0);

struct RepetitionPolicy {
  bool automatic = false;
  std::size_t count = 15;  // used when !automatic
};

struct ExperimentPlan {
  std::vector<Shape> sizes;
  std::vector<KernelVariant> variants;
  RepetitionPolicy reps;
  std::uint64_t seed = 1;
  std::size_t warmup = 1;
  bool regenerate_per_rep = false;
  std::size_t pilot_reps = 30;
  // Variance is ignored here; auto mode fills it from the pilot.
  PowerParams power;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const ExperimentPlan& plan);

struct TrialRecord {
  Shape size;
  KernelVariant variant;
  std::size_t rep = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed_a = 0;
  std::uint64_t seed_b = 0;
  std::string timestamp;  // ISO-8601 UTC, millisecond precision

  Configuration configuration() const { return {size, variant}; }
};

/// Runs `work` once and returns its duration in seconds.
using Timer = std::function<double(const std::function<void()>& work)>;

/// steady_clock stopwatch around a single call.
double time_once(const std::function<void()>& work);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp();

struct HarnessHooks {
  Timer timer = time_once;
  std::function<std::string()> clock = utc_timestamp;
  /// Called for each record as soon as it is produced.
  std::function<void(const TrialRecord&)> on_record;
  /// Called after each timed repetition with the inputs and the product.
  std::function<void(const TrialRecord&, const Matrix& a, const Matrix& b, const Matrix& c)>
      on_result;
  /// Called once per configuration with the number of timed repetitions.
  std::function<void(const Configuration&, std::size_t reps)> on_configuration_done;
};

/// Repetition count chosen in auto mode from pilot timings. The variance fed
/// to the power formula is the pilot's relative variance (variance / mean^2),
/// which makes it dimensionless like the standardized effect size.
std::size_t auto_repetitions(std::span<const double> pilot_seconds, const PowerParams& power,
                             std::size_t pilot_reps);

/// Executes every (size, variant) configuration in plan order: sizes outer,
/// variants inner, repetitions innermost. Inputs are generated outside the
/// timed region; each timed region is exactly one kernel call.
std::vector<TrialRecord> run_plan(const ExperimentPlan& plan, const HarnessHooks& hooks = {});

// Trial CSV with header
// size_m,size_n,size_p,variant,tile,workers,rep,wall_seconds,seed_a,seed_b,timestamp
// tile and workers are empty when the variant does not use them.
extern const char* const kTrialCsvHeader;
void write_trial_header(std::ostream& out);
void write_trial_row(std::ostream& out, const TrialRecord& record);
/// Throws ParseError with the offending line and field.
std::vector<TrialRecord> read_trials(std::istream& in);

}  // namespace gemmlab
