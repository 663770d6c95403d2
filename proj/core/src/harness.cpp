#include "gemmlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <istream>
#include <ostream>
#include <optional>
#include <stdexcept>

#include "gemmlab/errors.hpp"
#include "gemmlab/gaussian.hpp"
#include "gemmlab/numfmt.hpp"

namespace gemmlab {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t absorb(std::uint64_t state, std::uint64_t word) { return mix64(state ^ mix64(word)); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct Inputs {
  std::uint64_t seed_a;
  std::uint64_t seed_b;
  Matrix a;
  Matrix b;
};

// Keeps the compiler from discarding a product nobody reads.
volatile double g_sink = 0.0;

}  // namespace

std::string describe(const Shape& s) {
  if (s.is_square()) return std::to_string(s.m);
  return std::to_string(s.m) + ":" + std::to_string(s.n) + ":" + std::to_string(s.p);
}

Shape parse_shape(const std::string& text) {
  const auto parts = split(std::string(trim(text)), ':');
  if (parts.size() != 1 && parts.size() != 3) {
    throw ConfigError("size '" + text + "' must be n or m:n:p");
  }
  std::vector<std::size_t> dims;
  for (const auto& part : parts) {
    const auto v = parse_unsigned(part);
    if (!v || *v == 0) throw ConfigError("size '" + text + "' needs positive integer extents");
    dims.push_back(*v);
  }
  if (dims.size() == 1) return Shape::square(dims[0]);
  return {dims[0], dims[1], dims[2]};
}

std::uint64_t derive_seed(std::uint64_t base, const Shape& size, const KernelVariant& variant,
                          SeedRole role, std::uint64_t generation) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t word :
       {static_cast<std::uint64_t>(size.m), static_cast<std::uint64_t>(size.n),
        static_cast<std::uint64_t>(size.p), static_cast<std::uint64_t>(variant.kind),
        static_cast<std::uint64_t>(variant.tile), static_cast<std::uint64_t>(variant.workers),
        static_cast<std::uint64_t>(role), generation}) {
    h = absorb(h, word);
  }
  return h;
}

void validate(const ExperimentPlan& plan) {
  if (plan.sizes.empty()) throw ConfigError("plan needs at least one size");
  for (const auto& s : plan.sizes) {
    if (s.m == 0 || s.n == 0 || s.p == 0) throw ConfigError("plan size extents must be >= 1");
  }
  if (plan.variants.empty()) throw ConfigError("plan needs at least one kernel variant");
  for (const auto& v : plan.variants) {
    if (v.kind == KernelKind::tiled && v.tile == 0) throw ConfigError("tile must be >= 1");
    if (v.kind == KernelKind::parallel && v.workers == 0) throw ConfigError("workers must be >= 1");
  }
  if (!plan.reps.automatic && plan.reps.count < 2) {
    throw ConfigError("fixed repetitions must be >= 2");
  }
  if (plan.pilot_reps < 2) throw ConfigError("pilot repetitions must be >= 2");
  PowerParams check = plan.power;
  check.variance = 1.0;
  validate(check);
}

double time_once(const std::function<void()>& work) {
  const auto start = std::chrono::steady_clock::now();
  work();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(millis));
  return buf;
}

std::size_t auto_repetitions(std::span<const double> pilot_seconds, const PowerParams& power,
                             std::size_t pilot_reps) {
  const Summary pilot = summarize(pilot_seconds);
  PowerParams params = power;
  params.variance = pilot.variance / (pilot.mean * pilot.mean);
  return std::max(required_sample_size(params), pilot_reps);
}

std::vector<TrialRecord> run_plan(const ExperimentPlan& plan, const HarnessHooks& hooks) {
  validate(plan);
  const Timer timer = hooks.timer ? hooks.timer : Timer(time_once);
  const auto clock = hooks.clock ? hooks.clock : std::function<std::string()>(utc_timestamp);
  constexpr double kTick = static_cast<double>(std::chrono::steady_clock::period::num) /
                           static_cast<double>(std::chrono::steady_clock::period::den);

  std::vector<TrialRecord> records;
  for (const Shape& size : plan.sizes) {
    for (const KernelVariant& variant : plan.variants) {
      const Configuration config{size, variant};
      auto make_inputs = [&](std::uint64_t generation) {
        const auto seed_a = derive_seed(plan.seed, size, variant, SeedRole::a, generation);
        const auto seed_b = derive_seed(plan.seed, size, variant, SeedRole::b, generation);
        RandomStream sa(seed_a);
        RandomStream sb(seed_b);
        Matrix a = random_matrix(sa, size.m, size.n);
        Matrix b = random_matrix(sb, size.n, size.p);
        return Inputs{seed_a, seed_b, std::move(a), std::move(b)};
      };

      Inputs in = make_inputs(0);
      for (std::size_t w = 0; w < plan.warmup; ++w) g_sink = multiply(variant, in.a, in.b)(0, 0);

      std::vector<double> seconds;
      auto timed_rep = [&](std::size_t rep) {
        if (plan.regenerate_per_rep) in = make_inputs(rep + 1);
        std::optional<Matrix> product;
        double elapsed = 0.0;
        try {
          elapsed = timer([&] { product.emplace(multiply(variant, in.a, in.b)); });
        } catch (const std::exception& e) {
          throw std::runtime_error("configuration size=" + describe(size) +
                                   " variant=" + describe(variant) + ": " + e.what());
        }
        if (!std::isfinite(elapsed) || elapsed < 0.0) {
          throw std::runtime_error("clock failure: non-monotonic or invalid duration " +
                                   format_roundtrip(elapsed) + " s for size=" + describe(size) +
                                   " variant=" + describe(variant));
        }
        // A zero reading means the call finished within one clock tick.
        elapsed = std::max(elapsed, kTick);
        seconds.push_back(elapsed);
        TrialRecord record{size, variant, rep, elapsed, in.seed_a, in.seed_b, clock()};
        g_sink = (*product)(0, 0);
        if (hooks.on_result) hooks.on_result(record, in.a, in.b, *product);
        if (hooks.on_record) hooks.on_record(record);
        records.push_back(std::move(record));
      };

      std::size_t total = plan.reps.count;
      std::size_t rep = 0;
      if (plan.reps.automatic) {
        for (; rep < plan.pilot_reps; ++rep) timed_rep(rep);
        total = auto_repetitions(seconds, plan.power, plan.pilot_reps);
      }
      for (; rep < total; ++rep) timed_rep(rep);
      if (hooks.on_configuration_done) hooks.on_configuration_done(config, total);
    }
  }
  return records;
}

const char* const kTrialCsvHeader =
    "size_m,size_n,size_p,variant,tile,workers,rep,wall_seconds,seed_a,seed_b,timestamp";

void write_trial_header(std::ostream& out) { out << kTrialCsvHeader << '\n'; }

void write_trial_row(std::ostream& out, const TrialRecord& r) {
  out << r.size.m << ',' << r.size.n << ',' << r.size.p << ',' << kind_name(r.variant.kind) << ',';
  if (r.variant.kind == KernelKind::tiled) out << r.variant.tile;
  out << ',';
  if (r.variant.kind == KernelKind::parallel) out << r.variant.workers;
  out << ',' << r.rep << ',' << format_roundtrip(r.wall_seconds) << ',' << r.seed_a << ','
      << r.seed_b << ',' << r.timestamp << '\n';
}

std::vector<TrialRecord> read_trials(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trial file is empty", 1, 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrialCsvHeader) {
    throw ParseError("trial file header must be '" + std::string(kTrialCsvHeader) + "'", 1, 0);
  }
  std::vector<TrialRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) {
      throw ParseError("row " + std::to_string(row) + ": expected 11 fields, found " +
                           std::to_string(f.size()),
                       row, f.size());
    }
    auto field_error = [&](std::size_t col, const std::string& what) {
      return ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": " +
                            what + " '" + f[col - 1] + "'",
                        row, col);
    };
    auto positive = [&](std::size_t col) {
      const auto v = parse_unsigned(f[col - 1]);
      if (!v || *v == 0) throw field_error(col, "expected a positive integer, got");
      return static_cast<std::size_t>(*v);
    };
    auto unsigned_field = [&](std::size_t col) {
      const auto v = parse_unsigned(f[col - 1]);
      if (!v) throw field_error(col, "expected an unsigned integer, got");
      return *v;
    };
    TrialRecord r;
    r.size = {positive(1), positive(2), positive(3)};
    try {
      r.variant.kind = parse_kind(std::string(trim(f[3])));
    } catch (const ConfigError&) {
      throw field_error(4, "unknown variant");
    }
    if (r.variant.kind == KernelKind::tiled) r.variant.tile = positive(5);
    if (r.variant.kind == KernelKind::parallel) r.variant.workers = positive(6);
    r.rep = unsigned_field(7);
    const auto secs = parse_double(f[7]);
    if (!secs || !(*secs > 0.0) || !std::isfinite(*secs)) {
      throw field_error(8, "expected positive seconds, got");
    }
    r.wall_seconds = *secs;
    r.seed_a = unsigned_field(9);
    r.seed_b = unsigned_field(10);
    r.timestamp = std::string(trim(f[10]));
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace gemmlab
