#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gemmlab/harness.hpp"
#include "gemmlab/stats.hpp"

namespace gemmlab {

/// Aggregate of one (size, variant) configuration.
///
/// The speedup baseline is the naive kernel at the same size; parallel
/// variants prefer parallel:1 at the same size and fall back to naive.
/// Efficiency (speedup / workers) is only set for parallel variants.
struct SummaryRow {
  Shape size;
  KernelVariant variant;
  Summary summary;
  std::optional<double> speedup;
  std::optional<double> efficiency;
};

struct ComplexityFit {
  KernelVariant variant;
  double slope = 0.0;      // d log2(time) / d log2(n)
  double intercept = 0.0;  // log2 seconds at n = 1
  double r_squared = 0.0;
  std::size_t points = 0;
};

struct InputSeeds {
  Configuration configuration;
  std::uint64_t seed_a = 0;
  std::uint64_t seed_b = 0;
  bool regenerated = false;  // seeds change between repetitions
};

struct ReportMetadata {
  std::string source;
  std::string toolchain;
  std::string host;
  std::vector<InputSeeds> inputs;
  std::vector<std::string> notes;
};

struct ReportData {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;  // e.g. sizes with no speedup baseline
};

/// Groups records by configuration and summarizes each group. Rows are
/// ordered by size, then variant. Throws InsufficientDataError when a group
/// has fewer than two records.
ReportData summarize_trials(const std::vector<TrialRecord>& records);

/// Compiler, build and host description plus per-configuration input seeds.
ReportMetadata describe_run(const std::vector<TrialRecord>& records, std::string source);

/// Ordinary least squares of log2(mean seconds) on log2(n) over the square
/// sizes >= min_size measured for `variant`. Throws InsufficientDataError with
/// fewer than three such sizes.
ComplexityFit fit_complexity(const std::vector<SummaryRow>& rows, const KernelVariant& variant,
                             std::size_t min_size = 128);

/// Every variant that has enough square sizes to fit, in row order.
std::vector<ComplexityFit> fit_all(const std::vector<SummaryRow>& rows, std::size_t min_size = 128);

enum class ReportFormat { csv, json, markdown };

/// "csv", "json", "md" or "markdown"; throws ConfigError otherwise.
ReportFormat parse_report_format(const std::string& name);

extern const char* const kSummaryCsvHeader;

/// Throws ConfigError for an empty row set.
std::string render(const ReportData& data, const std::vector<ComplexityFit>& fits,
                   const ReportMetadata& meta, ReportFormat format);

/// Inverses of the csv and json renderings (rows only).
std::vector<SummaryRow> parse_summary_csv(std::istream& in);
std::vector<SummaryRow> parse_summary_json(const std::string& text);

}  // namespace gemmlab
