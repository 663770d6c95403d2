#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gemmlab/errors.hpp"
#include "gemmlab/gaussian.hpp"
#include "gemmlab/numfmt.hpp"
#include "gemmlab/plan_config.hpp"
#include "gemmlab/report.hpp"

namespace gemmlab::cli {
namespace {

namespace fs = std::filesystem;

// Usage problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

fs::path output_path(const std::string& flag_value, const char* default_name) {
  if (!flag_value.empty()) return flag_value;
  if (auto dir = env(kOutputDirEnv)) return fs::path(*dir) / default_name;
  return default_name;
}

std::uint64_t default_seed(std::uint64_t fallback) {
  if (auto s = env(kSeedEnv)) {
    const auto v = parse_unsigned(*s);
    if (!v) throw UsageError(std::string(kSeedEnv) + " must be an unsigned integer, got '" + *s + "'");
    return *v;
  }
  return fallback;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& args, bool seed_given, std::ostream& out) {
  const std::uint64_t seed = seed_given ? args.seed : default_seed(1);
  RandomStream stream(seed);
  const Matrix m = random_matrix(stream, args.rows, args.cols);
  const auto path = output_path(args.out, "matrix.csv");
  ensure_parent(path);
  save_csv(m, path);
  out << "wrote " << args.rows << "x" << args.cols << " matrix (seed " << seed << ") to "
      << path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string sizes = "8,32,64,100,128";
  std::size_t exhaustive = 8;
  std::string variants = "prefetch,tiled,parallel";
  std::string tiles = "4,32";
  std::string threads = "1,2,3,4,8";
  std::uint64_t seed = 0;
};

bool bit_exact_variant(const KernelVariant& v) { return v.kind != KernelKind::tiled; }

constexpr double kTiledTolerance = 1e-10;

struct CheckOutcome {
  bool pass = true;
  double max_abs = 0.0;
  double rel_frob = 0.0;
};

CheckOutcome check_variant(const KernelVariant& v, const Matrix& a, const Matrix& b,
                           const Matrix& reference, const Hooks& hooks) {
  Matrix c = multiply(v, a, b);
  if (hooks.corrupt_result) hooks.corrupt_result(v, c);
  CheckOutcome o;
  o.max_abs = max_abs_difference(reference, c);
  o.rel_frob = relative_frobenius_error(reference, c);
  o.pass = bit_exact_variant(v) ? (c == reference) : approx_equal(reference, c, kTiledTolerance);
  return o;
}

int cmd_verify(const VerifyArgs& args, bool seed_given, std::ostream& out, std::ostream& err,
               const Hooks& hooks) {
  const std::uint64_t seed = seed_given ? args.seed : default_seed(1);
  const auto shapes = parse_shape_list(args.sizes);
  const auto variants = parse_variant_list(args.variants, parse_count_list(args.tiles, "tile"),
                                           parse_count_list(args.threads, "threads"));
  auto inputs = [&](const Shape& s) {
    RandomStream sa(derive_seed(seed, s, KernelVariant::naive(), SeedRole::a));
    RandomStream sb(derive_seed(seed, s, KernelVariant::naive(), SeedRole::b));
    Matrix a = random_matrix(sa, s.m, s.n);
    Matrix b = random_matrix(sb, s.n, s.p);
    return std::pair{std::move(a), std::move(b)};
  };

  std::size_t failures = 0;
  auto report_failure = [&](const KernelVariant& v, const Shape& s, const CheckOutcome& o) {
    ++failures;
    err << "FAIL variant=" << describe(v) << " size=" << describe(s)
        << " max_abs_error=" << format_significant(o.max_abs, 6)
        << " rel_frobenius=" << format_significant(o.rel_frob, 6) << "\n";
  };

  out << std::left << std::setw(14) << "variant" << std::setw(20) << "size" << std::setw(10)
      << "mode" << std::setw(16) << "max_abs_err" << std::setw(16) << "rel_frobenius"
      << "status\n";
  auto row = [&](const KernelVariant& v, const std::string& size, const CheckOutcome& o) {
    out << std::left << std::setw(14) << describe(v) << std::setw(20) << size << std::setw(10)
        << (bit_exact_variant(v) ? "bitwise" : "1e-10") << std::setw(16)
        << format_significant(o.max_abs, 6) << std::setw(16) << format_significant(o.rel_frob, 6)
        << (o.pass ? "ok" : "FAIL") << "\n";
  };

  if (args.exhaustive > 0) {
    std::vector<CheckOutcome> worst(variants.size());
    const std::size_t limit = args.exhaustive;
    for (std::size_t m = 1; m <= limit; ++m) {
      for (std::size_t n = 1; n <= limit; ++n) {
        for (std::size_t p = 1; p <= limit; ++p) {
          const Shape s{m, n, p};
          const auto [a, b] = inputs(s);
          const Matrix reference = matmul_naive(a, b);
          for (std::size_t i = 0; i < variants.size(); ++i) {
            const auto o = check_variant(variants[i], a, b, reference, hooks);
            if (!o.pass) report_failure(variants[i], s, o);
            worst[i].pass = worst[i].pass && o.pass;
            worst[i].max_abs = std::max(worst[i].max_abs, o.max_abs);
            worst[i].rel_frob = std::max(worst[i].rel_frob, o.rel_frob);
          }
        }
      }
    }
    for (std::size_t i = 0; i < variants.size(); ++i) {
      row(variants[i], "1.." + std::to_string(limit) + " (all m,n,p)", worst[i]);
    }
  }

  for (const auto& s : shapes) {
    const auto [a, b] = inputs(s);
    const Matrix reference = matmul_naive(a, b);
    for (const auto& v : variants) {
      const auto o = check_variant(v, a, b, reference, hooks);
      if (!o.pass) report_failure(v, s, o);
      row(v, describe(s), o);
    }
  }

  if (failures > 0) {
    err << failures << " equivalence check(s) failed\n";
    return kExitFailure;
  }
  out << "all equivalence checks passed\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr BenchFlag kBenchFlags[] = {
    {"--sizes", "sizes", "Comma list of n or m:n:p (default 32,64,128,256,512,1024)"},
    {"--variants", "variants", "naive,prefetch,tiled[:T],parallel[:W] (default naive,parallel)"},
    {"--threads", "threads", "Worker counts for a bare 'parallel' (default 1,2,4,8,16)"},
    {"--tile", "tile", "Tile sizes for a bare 'tiled' (default 32)"},
    {"--reps", "reps", "Timed repetitions per configuration, or 'auto' (default 15)"},
    {"--pilot", "pilot", "Pilot repetitions in auto mode (default 30)"},
    {"--warmup", "warmup", "Untimed runs per configuration (default 1)"},
    {"--seed", "seed", "Base seed for input generation (default 1)"},
    {"--regenerate", "regenerate", "Fresh inputs every repetition: true|false (default false)"},
    {"--alpha", "alpha", "Significance level for auto repetitions (default 0.05)"},
    {"--power", "power", "Target power for auto repetitions (default 0.8)"},
    {"--effect-size", "effect_size", "Standardized effect size (default 0.5)"},
};

struct BenchArgs {
  std::string plan_file;
  std::string out;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  bool verbose = false;
};

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  Settings settings;
  if (auto s = env(kSeedEnv)) settings["seed"] = *s;
  std::string out_path = args.out;
  if (!args.plan_file.empty()) {
    std::ifstream in(args.plan_file);
    if (!in) throw UsageError("cannot open plan file '" + args.plan_file + "'");
    Settings file;
    try {
      file = parse_settings(in);
    } catch (const ParseError& e) {
      throw UsageError("plan file '" + args.plan_file + "': " + e.what());
    }
    for (auto& [key, value] : file) {
      if (key == "out") {
        if (out_path.empty()) out_path = value;
      } else if (!is_plan_key(key)) {
        throw UsageError("plan file '" + args.plan_file + "': unknown key '" + key + "'");
      } else {
        settings[key] = value;
      }
    }
  }
  for (const auto& [key, opt] : args.flag_options) {
    if (opt->count() > 0) settings[key] = args.flag_values.at(key);
  }
  const ExperimentPlan plan = build_plan(settings);

  const auto path = output_path(out_path, "trials.csv");
  ensure_parent(path);
  std::ofstream csv(path, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_trial_header(csv);
  csv.flush();

  HarnessHooks h = hooks.harness;
  auto user_record = h.on_record;
  h.on_record = [&](const TrialRecord& r) {
    write_trial_row(csv, r);
    csv.flush();
    if (!csv) throw std::runtime_error("failed writing trial to '" + path.string() + "'");
    if (user_record) user_record(r);
  };
  auto user_done = h.on_configuration_done;
  h.on_configuration_done = [&](const Configuration& c, std::size_t reps) {
    if (args.verbose) {
      err << "size " << describe(c.size) << " " << describe(c.variant) << ": " << reps
          << " repetitions\n";
    }
    if (user_done) user_done(c, reps);
  };
  const auto records = run_plan(plan, h);
  out << "wrote " << records.size() << " trials to " << path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string input;
  std::string format = "md";
  std::string out;
};

int cmd_report(const ReportArgs& args, std::ostream& out) {
  const ReportFormat format = parse_report_format(args.format);
  std::ifstream in(args.input);
  if (!in) throw std::runtime_error("cannot open trial file '" + args.input + "'");
  const auto records = read_trials(in);
  if (records.empty()) throw std::runtime_error("trial file '" + args.input + "' has no trials");
  const auto data = summarize_trials(records);
  const auto fits = fit_all(data.rows);
  const auto text = render(data, fits, describe_run(records, args.input), format);

  std::string target = args.out;
  if (target.empty()) {
    if (auto dir = env(kOutputDirEnv)) {
      const char* ext = format == ReportFormat::markdown ? "md"
                        : format == ReportFormat::csv   ? "csv"
                                                        : "json";
      target = (fs::path(*dir) / (std::string("report.") + ext)).string();
    }
  }
  if (target.empty()) {
    out << text;
    return kExitOk;
  }
  ensure_parent(target);
  std::ofstream file(target, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + target + "' for writing");
  file << text;
  file.flush();
  if (!file) throw std::runtime_error("failed writing report to '" + target + "'");
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const Hooks& hooks) {
  CLI::App app{"gemmlab: dense matrix multiplication kernels and benchmark harness"};
  app.name("gemmlab");
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress informational output");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a Gaussian random matrix as CSV");
  gen_cmd->add_option("--rows", gen.rows, "Row count")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols, "Column count")->required()->check(CLI::PositiveNumber);
  auto* gen_seed = gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV path");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check every kernel against the naive reference");
  verify_cmd->add_option("--sizes", verify.sizes, "Comma list of n or m:n:p")->capture_default_str();
  verify_cmd->add_option("--exhaustive", verify.exhaustive,
                         "Also check every m,n,p in 1..N (0 disables)")
      ->capture_default_str();
  verify_cmd->add_option("--variants", verify.variants, "Variants to check")->capture_default_str();
  verify_cmd->add_option("--tile", verify.tiles, "Tile sizes for a bare 'tiled'")->capture_default_str();
  verify_cmd->add_option("--threads", verify.threads, "Worker counts for a bare 'parallel'")
      ->capture_default_str();
  auto* verify_seed = verify_cmd->add_option("--seed", verify.seed, "Random seed");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment plan and stream trials as CSV");
  bench_cmd->add_option("--plan", bench.plan_file, "Plan file (key = value lines)");
  bench_cmd->add_option("--out", bench.out, "Trial CSV path (default trials.csv)");
  bench_cmd->add_flag("-v,--verbose", bench.verbose, "Print per-configuration progress");
  for (const auto& f : kBenchFlags) {
    bench.flag_options[f.key] = bench_cmd->add_option(f.flag, bench.flag_values[f.key], f.help);
  }

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summarize a trial CSV");
  report_cmd->add_option("--input", report.input, "Trial CSV from 'bench'")->required();
  report_cmd->add_option("--format", report.format, "md, csv or json")->capture_default_str();
  report_cmd->add_option("--out", report.out, "Output path (default stdout)");

  std::ostringstream sink;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  std::ostream& info = quiet ? sink : out;

  try {
    if (*gen_cmd) return cmd_gen(gen, gen_seed->count() > 0, info);
    if (*verify_cmd) return cmd_verify(verify, verify_seed->count() > 0, info, err, hooks);
    if (*bench_cmd) return cmd_bench(bench, info, err, hooks);
    if (*report_cmd) return cmd_report(report, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gemmlab::cli
