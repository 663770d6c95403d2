// Acceptance suite: one line per criterion, exit status 0 iff all pass.
//
//   gemmlab_acceptance            run every criterion
//   gemmlab_acceptance 1 4 5      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "gemmlab/gaussian.hpp"
#include "gemmlab/harness.hpp"
#include "gemmlab/kernels.hpp"
#include "gemmlab/numfmt.hpp"
#include "gemmlab/plan_config.hpp"
#include "gemmlab/report.hpp"
#include "gemmlab/stats.hpp"
#include "test_support.hpp"

namespace {

using namespace gemmlab;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_significant(v, 6); }

int invoke_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "gemmlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (code != 0) std::cerr << err.str();
  return code;
}

const testing::TempDir& workdir() {
  static testing::TempDir dir("acceptance");
  return dir;
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence through the verify subcommand.

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::string out;
  const int code = invoke_cli({"verify", "--exhaustive", "8", "--sizes", "32,64,100,128",
                               "--variants", "prefetch,tiled,parallel", "--tile", "1,3,32",
                               "--threads", "1,2,3,4,8,16"},
                              &out);
  const double elapsed = seconds_since(start);
  // Header, one line per (variant, size group), closing verdict.
  const auto groups = static_cast<long>(std::count(out.begin(), out.end(), '\n')) - 2;
  return {code == 0 && elapsed < 30.0,
          "verify exit " + std::to_string(code) + ", " + std::to_string(groups) +
              " variant/size groups, " + fmt(elapsed) + " s (limit 30 s)"};
}

// ---------------------------------------------------------------------------
// 2. Naive kernel scales as n^3.

Outcome cubic_scaling() {
  ExperimentPlan plan;
  plan.sizes = {Shape::square(128), Shape::square(256), Shape::square(512), Shape::square(1024)};
  plan.variants = {KernelVariant::naive()};
  plan.reps = {false, 5};
  plan.seed = 2;
  const auto records = run_plan(plan);
  const auto data = summarize_trials(records);
  const auto fit = fit_complexity(data.rows, KernelVariant::naive());
  std::string means;
  for (const auto& r : data.rows) means += " " + describe(r.size) + ":" + fmt(r.summary.mean);
  const bool pass = fit.slope >= 2.5 && fit.slope <= 3.5 && fit.r_squared >= 0.98;
  return {pass, "slope " + fmt(fit.slope) + " (need [2.5, 3.5]), r^2 " + fmt(fit.r_squared) +
                    " (need >= 0.98); means" + means};
}

// ---------------------------------------------------------------------------
// 7. Protocol fidelity with the default plan; its trials also feed 3.

struct DefaultRun {
  std::vector<TrialRecord> records;
  std::string markdown;
  int bench_code = -1;
  int report_code = -1;
};

const DefaultRun& default_run() {
  static std::optional<DefaultRun> run;
  if (run) return *run;
  run.emplace();
  const auto trials = (workdir() / "default_trials.csv").string();
  const auto report = (workdir() / "default_report.md").string();
  std::cerr << "running the default plan (sizes 32..1024, naive + parallel 1..16, 15 reps)...\n";
  run->bench_code = invoke_cli({"bench", "--out", trials});
  if (run->bench_code == 0) {
    std::ifstream in(trials);
    run->records = read_trials(in);
    run->report_code = invoke_cli({"report", "--input", trials, "--format", "md", "--out", report});
    run->markdown = testing::slurp(report);
  }
  return *run;
}

std::vector<std::string> table_headers(const std::string& markdown) {
  std::vector<std::string> headers;
  std::istringstream in(markdown);
  std::string line;
  std::string previous;
  while (std::getline(in, line)) {
    if (line.rfind("|---", 0) == 0 && previous.rfind("| Matrix Size", 0) == 0) {
      headers.push_back(previous + "\n" + line);
    }
    previous = line;
  }
  return headers;
}

Outcome protocol_fidelity() {
  const auto& run = default_run();
  if (run.bench_code != 0 || run.report_code != 0) {
    return {false, "bench exit " + std::to_string(run.bench_code) + ", report exit " +
                       std::to_string(run.report_code)};
  }
  const ExperimentPlan plan = build_plan({});
  std::map<std::pair<Shape, std::string>, std::size_t> counts;
  for (const auto& r : run.records) ++counts[{r.size, describe(r.variant)}];
  const std::size_t expected_configs = plan.sizes.size() * plan.variants.size();
  bool all_fifteen = counts.size() == expected_configs;
  for (const auto& [key, n] : counts) all_fifteen = all_fifteen && n == 15;

  const auto golden = table_headers(testing::slurp(std::string(GEMMLAB_GOLDEN_DIR) + "/report.md"));
  const auto actual = table_headers(run.markdown);
  const bool schema = actual == golden;

  std::size_t size_rows = 0;
  std::size_t thread_rows = 0;
  std::istringstream in(run.markdown);
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    if (line.rfind("## ", 0) == 0) section = line;
    if (line.rfind("| ", 0) == 0 && line.find('x') != std::string::npos &&
        line.rfind("| Matrix Size", 0) != 0) {
      if (section == "## Size sweep") ++size_rows;
      if (section == "## Thread sweep") ++thread_rows;
    }
  }
  const bool rows_ok = size_rows + thread_rows == expected_configs;
  return {all_fifteen && schema && rows_ok,
          std::to_string(counts.size()) + " configurations x 15 trials: " +
              (all_fifteen ? "yes" : "no") + "; table schema vs golden: " +
              (schema ? "match" : "MISMATCH") + "; summary rows " +
              std::to_string(size_rows + thread_rows) + "/" + std::to_string(expected_configs)};
}

// ---------------------------------------------------------------------------
// 3. Thread-sweep shape at 1024^2.

Outcome parallel_speedup() {
  const auto& run = default_run();
  if (run.bench_code != 0) return {false, "default plan failed to run"};
  std::vector<TrialRecord> big;
  for (const auto& r : run.records) {
    if (r.size == Shape::square(1024) && r.variant.kind == KernelKind::parallel) big.push_back(r);
  }
  const auto data = summarize_trials(big);
  bool efficiency_ok = !data.rows.empty();
  std::string effs;
  std::optional<double> speedup4;
  for (const auto& r : data.rows) {
    const double e = *r.efficiency;
    efficiency_ok = efficiency_ok && e <= 1.10;
    effs += " w" + std::to_string(r.variant.workers) + "=" + fmt(e);
    if (r.variant.workers == 4) speedup4 = r.speedup;
  }
  const unsigned cores = std::thread::hardware_concurrency();
  std::string detail = "efficiency <= 1.10:" + effs + (efficiency_ok ? " ok" : " VIOLATED");
  bool speedup_ok = true;
  if (cores >= 4) {
    speedup_ok = speedup4 && *speedup4 >= 2.0;
    detail += "; speedup(4) " + (speedup4 ? fmt(*speedup4) : std::string("missing")) + " (need >= 2)";
  } else {
    detail += "; speedup(4) " + (speedup4 ? fmt(*speedup4) : std::string("missing")) +
              " not gated: host reports " + std::to_string(cores) +
              " hardware thread(s), criterion requires >= 4 cores";
  }
  return {efficiency_ok && speedup_ok, detail};
}

// ---------------------------------------------------------------------------
// 4. Box-Muller statistics.

Outcome box_muller_statistics() {
  const auto start = Clock::now();
  RandomStream s(20240901);
  constexpr int kDraws = 1'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double z = s.next_gaussian();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / kDraws;
  const double variance = (sum_sq - kDraws * mean * mean) / (kDraws - 1);

  RandomStream pairs(77);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const auto [u1, u2] = pairs.next_uniform_pair();
    const auto z = box_muller(u1, u2);
    worst = std::max(worst, std::abs(z.z0 * z.z0 + z.z1 * z.z1 + 2.0 * std::log(u1)));
  }
  const double elapsed = seconds_since(start);
  const bool pass = std::abs(mean) <= 0.005 && std::abs(variance - 1.0) <= 0.01 && worst <= 1e-12 &&
                    elapsed < 5.0;
  return {pass, "mean " + fmt(mean) + ", variance " + fmt(variance) + ", max radius residual " +
                    fmt(worst) + ", " + fmt(elapsed) + " s"};
}

// ---------------------------------------------------------------------------
// 5. Power analysis.

Outcome power_analysis() {
  const auto n = required_sample_size({0.05, 0.8, 0.5, 1.0});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> alpha(0.001, 0.5);
  std::uniform_real_distribution<double> power(0.5, 0.999);
  std::uniform_real_distribution<double> effect(0.01, 5.0);
  std::uniform_real_distribution<double> variance(0.0, 20.0);
  std::uniform_real_distribution<double> bump(1.0, 3.0);
  std::size_t violations = 0;
  constexpr int kTrials = 10'000;
  for (int i = 0; i < kTrials; ++i) {
    const PowerParams p{alpha(rng), power(rng), effect(rng), variance(rng)};
    const auto base = required_sample_size(p);
    PowerParams v = p;
    v.variance *= bump(rng);
    PowerParams e = p;
    e.effect_size *= bump(rng);
    PowerParams a = p;
    a.alpha = std::min(0.999, p.alpha * bump(rng));
    violations += required_sample_size(v) < base;
    violations += required_sample_size(e) > base;
    violations += required_sample_size(a) > base;
  }
  return {n == 63 && violations == 0,
          "n(0.05, 0.8, 0.5, 1) = " + std::to_string(n) + " (expect 63); monotonicity violations " +
              std::to_string(violations) + " over " + std::to_string(kTrials) + " grid points"};
}

// ---------------------------------------------------------------------------
// 6. Summary statistics.

Outcome summary_statistics() {
  const std::vector<double> five = {1, 2, 3, 4, 5};
  const auto s = summarize(five);
  const bool exact = s.mean == 3.0 && s.variance == 2.5;

  std::mt19937_64 rng(6);
  std::lognormal_distribution<double> secs(-4.0, 0.7);
  std::uniform_int_distribution<int> len(2, 100);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  std::size_t failures = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> x(static_cast<std::size_t>(len(rng)));
    for (double& v : x) v = secs(rng);
    const auto base = summarize(x);
    auto perm = x;
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto p = summarize(perm);
    failures += p.mean != base.mean || p.variance != base.variance;
    const double c = shift(rng);
    auto moved = x;
    for (double& v : moved) v += c;
    const auto m = summarize(moved);
    failures += std::abs(m.mean - (base.mean + c)) > 1e-12 * std::abs(base.mean + c);
    failures += std::abs(m.variance - base.variance) > 1e-12 * base.variance;
  }
  return {exact && failures == 0,
          "summarize([1..5]) mean " + fmt(s.mean) + " variance " + fmt(s.variance) +
              "; property failures " + std::to_string(failures) + "/1000 samples"};
}

// ---------------------------------------------------------------------------
// 8. Determinism of inputs and outputs for a plan file.

Outcome determinism() {
  const auto plan_path = workdir() / "determinism.plan";
  testing::spit(plan_path,
                "sizes = 48, 2:3:4, 33:17:9\n"
                "variants = naive, prefetch, tiled:8, parallel\n"
                "threads = 1,2,3,4,8,16\n"
                "reps = 2\n"
                "seed = 99\n");
  std::ifstream in(plan_path);
  const ExperimentPlan plan = build_plan(parse_settings(in));

  struct Capture {
    std::vector<TrialRecord> records;
    std::vector<Matrix> matrices;  // a, b, c per timed repetition
  };
  auto execute = [&] {
    Capture cap;
    HarnessHooks hooks;
    hooks.on_result = [&](const TrialRecord& r, const Matrix& a, const Matrix& b, const Matrix& c) {
      cap.records.push_back(r);
      cap.matrices.push_back(a);
      cap.matrices.push_back(b);
      cap.matrices.push_back(c);
    };
    run_plan(plan, hooks);
    return cap;
  };
  const Capture first = execute();
  const Capture second = execute();

  std::size_t input_mismatch = 0;
  std::size_t output_mismatch = 0;
  std::size_t regen_mismatch = 0;
  std::size_t oracle_mismatch = 0;
  if (first.matrices.size() != second.matrices.size()) return {false, "run lengths differ"};
  for (std::size_t i = 0; i < first.records.size(); ++i) {
    const auto& r = first.records[i];
    const Matrix& a = first.matrices[3 * i];
    const Matrix& b = first.matrices[3 * i + 1];
    const Matrix& c = first.matrices[3 * i + 2];
    input_mismatch += !(a == second.matrices[3 * i]) || !(b == second.matrices[3 * i + 1]) ||
                      r.seed_a != second.records[i].seed_a || r.seed_b != second.records[i].seed_b;
    output_mismatch += !(c == second.matrices[3 * i + 2]);
    RandomStream sa(r.seed_a);
    RandomStream sb(r.seed_b);
    regen_mismatch += !(random_matrix(sa, r.size.m, r.size.n) == a) ||
                      !(random_matrix(sb, r.size.n, r.size.p) == b);
    if (r.variant.kind == KernelKind::parallel || r.variant.kind == KernelKind::prefetch) {
      oracle_mismatch += !(matmul_naive(a, b) == c);
    }
  }
  const bool pass = input_mismatch + output_mismatch + regen_mismatch + oracle_mismatch == 0;
  return {pass, std::to_string(first.records.size()) + " trials compared: input mismatches " +
                    std::to_string(input_mismatch) + ", output mismatches " +
                    std::to_string(output_mismatch) + ", seed regeneration mismatches " +
                    std::to_string(regen_mismatch) + ", parallel/prefetch vs naive mismatches " +
                    std::to_string(oracle_mismatch)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  // 7 runs before 3 because 3 reuses its thread-sweep trials.
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "naive O(n^3) scaling", cubic_scaling},
      {7, "protocol fidelity", protocol_fidelity},
      {3, "parallel speedup shape", parallel_speedup},
      {4, "Box-Muller statistics", box_muller_statistics},
      {5, "power analysis", power_analysis},
      {6, "summary statistics", summary_statistics},
      {8, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
