#include "gemmlab/report.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gemmlab/errors.hpp"
#include "gemmlab/numfmt.hpp"

namespace gemmlab {
namespace {

using Json = nlohmann::ordered_json;

bool config_less(const Configuration& x, const Configuration& y) {
  if (x.size != y.size) return x.size < y.size;
  return x.variant < y.variant;
}

// Derived ratios are published at 6 significant digits.
double round6(double x) { return *parse_double(format_significant(x, 6)); }

std::string size_label(const Shape& s) {
  if (s.is_square()) return std::to_string(s.m) + "x" + std::to_string(s.m);
  return std::to_string(s.m) + "x" + std::to_string(s.n) + "*" + std::to_string(s.n) + "x" +
         std::to_string(s.p);
}

std::string optional_csv(const std::optional<double>& v) {
  return v ? format_significant(*v, 6) : std::string();
}

std::string optional_md(const std::optional<double>& v) {
  return v ? format_significant(*v, 6) : std::string("n/a");
}

Json optional_json(const std::optional<double>& v) {
  return v ? Json(round6(*v)) : Json(nullptr);
}

std::string render_csv(const ReportData& data) {
  std::ostringstream out;
  out << kSummaryCsvHeader << '\n';
  for (const auto& r : data.rows) {
    const auto& s = r.summary;
    out << r.size.m << ',' << r.size.n << ',' << r.size.p << ',' << kind_name(r.variant.kind)
        << ',';
    if (r.variant.kind == KernelKind::tiled) out << r.variant.tile;
    out << ',';
    if (r.variant.kind == KernelKind::parallel) out << r.variant.workers;
    out << ',' << s.n << ',' << format_roundtrip(s.mean) << ',' << format_roundtrip(s.variance)
        << ',' << format_roundtrip(s.std_dev) << ',' << format_roundtrip(s.min) << ','
        << format_roundtrip(s.max) << ',' << format_roundtrip(s.ci95_half_width) << ','
        << optional_csv(r.speedup) << ',' << optional_csv(r.efficiency) << '\n';
  }
  return out.str();
}

Json row_json(const SummaryRow& r) {
  const auto& s = r.summary;
  Json j;
  j["size"] = {{"m", r.size.m}, {"n", r.size.n}, {"p", r.size.p}};
  j["variant"] = kind_name(r.variant.kind);
  j["tile"] = r.variant.kind == KernelKind::tiled ? Json(r.variant.tile) : Json(nullptr);
  j["workers"] = r.variant.kind == KernelKind::parallel ? Json(r.variant.workers) : Json(nullptr);
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["std_dev"] = s.std_dev;
  j["min"] = s.min;
  j["max"] = s.max;
  j["ci95_half_width"] = s.ci95_half_width;
  j["speedup"] = optional_json(r.speedup);
  j["efficiency"] = optional_json(r.efficiency);
  return j;
}

std::string render_json(const ReportData& data, const std::vector<ComplexityFit>& fits,
                        const ReportMetadata& meta) {
  Json doc;
  Json m;
  m["source"] = meta.source;
  m["toolchain"] = meta.toolchain;
  m["host"] = meta.host;
  Json plan;
  Json sizes = Json::array();
  Json variants = Json::array();
  for (const auto& r : data.rows) {
    if (std::find(sizes.begin(), sizes.end(), describe(r.size)) == sizes.end()) {
      sizes.push_back(describe(r.size));
    }
    if (std::find(variants.begin(), variants.end(), describe(r.variant)) == variants.end()) {
      variants.push_back(describe(r.variant));
    }
  }
  plan["sizes"] = sizes;
  plan["variants"] = variants;
  Json inputs = Json::array();
  for (const auto& in : meta.inputs) {
    inputs.push_back({{"size", describe(in.configuration.size)},
                      {"variant", describe(in.configuration.variant)},
                      {"seed_a", in.seed_a},
                      {"seed_b", in.seed_b},
                      {"regenerated_per_rep", in.regenerated}});
  }
  plan["inputs"] = inputs;
  m["plan"] = plan;
  m["warnings"] = data.warnings;
  m["notes"] = meta.notes;
  doc["metadata"] = m;
  Json rows = Json::array();
  for (const auto& r : data.rows) rows.push_back(row_json(r));
  doc["rows"] = rows;
  Json cx = Json::array();
  for (const auto& f : fits) {
    cx.push_back({{"variant", describe(f.variant)},
                  {"slope", f.slope},
                  {"intercept", f.intercept},
                  {"r_squared", f.r_squared},
                  {"points", f.points}});
  }
  doc["complexity"] = cx;
  return doc.dump(2) + "\n";
}

std::string render_markdown(const ReportData& data, const std::vector<ComplexityFit>& fits,
                            const ReportMetadata& meta) {
  std::ostringstream out;
  out << "# Matrix multiplication benchmark report\n\n";
  if (!meta.source.empty()) out << "- Source: `" << meta.source << "`\n";
  if (!meta.toolchain.empty()) out << "- Toolchain: " << meta.toolchain << "\n";
  if (!meta.host.empty()) out << "- Host: " << meta.host << "\n";
  for (const auto& note : meta.notes) out << "- Note: " << note << "\n";
  for (const auto& w : data.warnings) out << "- **Warning:** " << w << "\n";
  out << "\n";

  std::vector<const SummaryRow*> serial;
  std::vector<const SummaryRow*> threaded;
  for (const auto& r : data.rows) {
    (r.variant.kind == KernelKind::parallel ? threaded : serial).push_back(&r);
  }
  if (!serial.empty()) {
    out << "## Size sweep\n\n";
    out << "| Matrix Size | Variant | Avg Time (sec) | Speedup |\n";
    out << "|---|---|---|---|\n";
    for (const auto* r : serial) {
      out << "| " << size_label(r->size) << " | " << describe(r->variant) << " | "
          << format_significant(r->summary.mean, 6) << " | " << optional_md(r->speedup) << " |\n";
    }
    out << "\n";
  }
  if (!threaded.empty()) {
    out << "## Thread sweep\n\n";
    out << "| Matrix Size | Workers | Avg Time (sec) | Speedup | Efficiency |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto* r : threaded) {
      out << "| " << size_label(r->size) << " | " << r->variant.workers << " | "
          << format_significant(r->summary.mean, 6) << " | " << optional_md(r->speedup) << " | "
          << optional_md(r->efficiency) << " |\n";
    }
    out << "\n";
  }

  out << "## Dispersion\n\n";
  out << "| Matrix Size | Variant | Reps | Min (sec) | Std Dev (sec) | 95% CI (sec) |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& r : data.rows) {
    out << "| " << size_label(r.size) << " | " << describe(r.variant) << " | " << r.summary.n
        << " | " << format_significant(r.summary.min, 6) << " | "
        << format_significant(r.summary.std_dev, 6) << " | ±"
        << format_significant(r.summary.ci95_half_width, 6) << " |\n";
  }
  out << "\n";

  out << "## Complexity\n\n";
  if (fits.empty()) {
    out << "Fewer than three square sizes >= 128 per variant; no exponent fitted.\n";
  } else {
    out << "| Variant | Slope | R^2 | Sizes |\n";
    out << "|---|---|---|---|\n";
    for (const auto& f : fits) {
      out << "| " << describe(f.variant) << " | " << format_significant(f.slope, 6) << " | "
          << format_significant(f.r_squared, 6) << " | " << f.points << " |\n";
    }
  }
  return out.str();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> f;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    f.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return f;
}

KernelVariant variant_from(const std::string& kind, std::size_t tile, std::size_t workers) {
  const KernelKind k = parse_kind(kind);
  if (k == KernelKind::tiled) return KernelVariant::tiled(tile);
  if (k == KernelKind::parallel) return KernelVariant::parallel(workers);
  return {k, 0, 0};
}

}  // namespace

const char* const kSummaryCsvHeader =
    "size_m,size_n,size_p,variant,tile,workers,n,mean,variance,std_dev,min,max,ci95_half_width,"
    "speedup,efficiency";

ReportData summarize_trials(const std::vector<TrialRecord>& records) {
  std::vector<Configuration> order;
  std::vector<std::vector<double>> samples;
  for (const auto& r : records) {
    const auto c = r.configuration();
    auto it = std::find(order.begin(), order.end(), c);
    if (it == order.end()) {
      order.push_back(c);
      samples.emplace_back();
      it = order.end() - 1;
    }
    samples[static_cast<std::size_t>(it - order.begin())].push_back(r.wall_seconds);
  }

  ReportData data;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (samples[i].size() < 2) {
      throw InsufficientDataError("configuration size=" + describe(order[i].size) + " variant=" +
                                  describe(order[i].variant) + " has " +
                                  std::to_string(samples[i].size()) +
                                  " trial(s); at least 2 are needed");
    }
    data.rows.push_back({order[i].size, order[i].variant, summarize(samples[i]), {}, {}});
  }
  std::sort(data.rows.begin(), data.rows.end(), [](const SummaryRow& x, const SummaryRow& y) {
    return config_less({x.size, x.variant}, {y.size, y.variant});
  });

  auto find_mean = [&](const Shape& size, const KernelVariant& v) -> std::optional<double> {
    for (const auto& r : data.rows) {
      if (r.size == size && r.variant == v) return r.summary.mean;
    }
    return std::nullopt;
  };
  std::vector<std::string> missing;
  for (auto& r : data.rows) {
    std::optional<double> base;
    if (r.variant.kind == KernelKind::parallel) base = find_mean(r.size, KernelVariant::parallel(1));
    if (!base) base = find_mean(r.size, KernelVariant::naive());
    if (!base) {
      const auto label = describe(r.size);
      if (std::find(missing.begin(), missing.end(), label) == missing.end()) {
        missing.push_back(label);
      }
      continue;
    }
    r.speedup = *base / r.summary.mean;
    if (r.variant.kind == KernelKind::parallel) {
      r.efficiency = *base / r.summary.mean / static_cast<double>(r.variant.workers);
    }
  }
  for (const auto& label : missing) {
    data.warnings.push_back("no naive or parallel:1 baseline at size " + label +
                            "; speedup omitted");
  }
  return data;
}

ReportMetadata describe_run(const std::vector<TrialRecord>& records, std::string source) {
  ReportMetadata meta;
  meta.source = std::move(source);
#if defined(__clang__)
  meta.toolchain = "clang " __clang_version__;
#elif defined(__GNUC__)
  meta.toolchain = "gcc " __VERSION__;
#else
  meta.toolchain = "unknown compiler";
#endif
#ifdef NDEBUG
  meta.toolchain += ", optimized build";
#else
  meta.toolchain += ", debug build";
#endif
  char host[256] = {};
  if (gethostname(host, sizeof host - 1) != 0) host[0] = '\0';
  meta.host = std::string(host[0] ? host : "unknown-host") + ", " +
              std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
  for (const auto& r : records) {
    const auto c = r.configuration();
    auto it = std::find_if(meta.inputs.begin(), meta.inputs.end(),
                           [&](const InputSeeds& s) { return s.configuration == c; });
    if (it == meta.inputs.end()) {
      meta.inputs.push_back({c, r.seed_a, r.seed_b, false});
    } else if (it->seed_a != r.seed_a || it->seed_b != r.seed_b) {
      it->regenerated = true;
    }
  }
  meta.notes = {
      "prefetch timings include the transpose of B",
      "speedup baseline: naive at the same size; parallel rows use parallel:1 when present",
      "auto repetitions size the sample from pilot variance relative to the squared pilot mean",
  };
  return meta;
}

ComplexityFit fit_complexity(const std::vector<SummaryRow>& rows, const KernelVariant& variant,
                             std::size_t min_size) {
  std::vector<std::pair<double, double>> points;
  for (const auto& r : rows) {
    if (r.variant != variant || !r.size.is_square() || r.size.m < min_size) continue;
    points.emplace_back(std::log2(static_cast<double>(r.size.m)), std::log2(r.summary.mean));
  }
  if (points.size() < 3) {
    throw InsufficientDataError("complexity fit for " + describe(variant) + " needs 3 square sizes >= " +
                                std::to_string(min_size) + ", found " +
                                std::to_string(points.size()));
  }
  const double count = static_cast<double>(points.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("complexity fit needs distinct sizes");
  ComplexityFit fit;
  fit.variant = variant;
  fit.points = points.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double residual = 0.0;
  for (const auto& [x, y] : points) {
    const double e = y - (fit.intercept + fit.slope * x);
    residual += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - residual / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<ComplexityFit> fit_all(const std::vector<SummaryRow>& rows, std::size_t min_size) {
  std::vector<KernelVariant> variants;
  for (const auto& r : rows) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
      variants.push_back(r.variant);
    }
  }
  std::sort(variants.begin(), variants.end());
  std::vector<ComplexityFit> fits;
  for (const auto& v : variants) {
    try {
      fits.push_back(fit_complexity(rows, v, min_size));
    } catch (const InsufficientDataError&) {
    }
  }
  return fits;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "md" || name == "markdown") return ReportFormat::markdown;
  throw ConfigError("unknown report format '" + name + "' (expected md, csv or json)");
}

std::string render(const ReportData& data, const std::vector<ComplexityFit>& fits,
                   const ReportMetadata& meta, ReportFormat format) {
  if (data.rows.empty()) throw ConfigError("nothing to report: no summary rows");
  switch (format) {
    case ReportFormat::csv: return render_csv(data);
    case ReportFormat::json: return render_json(data, fits, meta);
    case ReportFormat::markdown: return render_markdown(data, fits, meta);
  }
  throw ConfigError("unknown report format");
}

std::vector<SummaryRow> parse_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryCsvHeader) {
    throw ParseError("summary csv header mismatch", 1, 0);
  }
  std::vector<SummaryRow> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 15) throw ParseError("summary row " + std::to_string(row) + ": 15 fields expected", row, f.size());
    auto num = [&](std::size_t col) {
      const auto v = parse_double(f[col]);
      if (!v) throw ParseError("summary row " + std::to_string(row) + ": bad number '" + f[col] + "'", row, col + 1);
      return *v;
    };
    auto count = [&](std::size_t col) -> std::size_t {
      if (trim(f[col]).empty()) return 0;
      const auto v = parse_unsigned(f[col]);
      if (!v) throw ParseError("summary row " + std::to_string(row) + ": bad count '" + f[col] + "'", row, col + 1);
      return *v;
    };
    auto opt = [&](std::size_t col) -> std::optional<double> {
      if (trim(f[col]).empty()) return std::nullopt;
      return num(col);
    };
    SummaryRow r;
    r.size = {count(0), count(1), count(2)};
    r.variant = variant_from(std::string(trim(f[3])), count(4), count(5));
    r.summary = {count(6), num(7), num(8), num(9), num(10), num(11), num(12)};
    r.speedup = opt(13);
    r.efficiency = opt(14);
    rows.push_back(r);
  }
  return rows;
}

std::vector<SummaryRow> parse_summary_json(const std::string& text) {
  const Json doc = Json::parse(text);
  std::vector<SummaryRow> rows;
  for (const auto& j : doc.at("rows")) {
    SummaryRow r;
    r.size = {j.at("size").at("m").get<std::size_t>(), j.at("size").at("n").get<std::size_t>(),
              j.at("size").at("p").get<std::size_t>()};
    const auto tile = j.at("tile").is_null() ? 0 : j.at("tile").get<std::size_t>();
    const auto workers = j.at("workers").is_null() ? 0 : j.at("workers").get<std::size_t>();
    r.variant = variant_from(j.at("variant").get<std::string>(), tile, workers);
    r.summary = {j.at("n").get<std::size_t>(), j.at("mean").get<double>(),
                 j.at("variance").get<double>(), j.at("std_dev").get<double>(),
                 j.at("min").get<double>(), j.at("max").get<double>(),
                 j.at("ci95_half_width").get<double>()};
    if (!j.at("speedup").is_null()) r.speedup = j.at("speedup").get<double>();
    if (!j.at("efficiency").is_null()) r.efficiency = j.at("efficiency").get<double>();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace gemmlab
