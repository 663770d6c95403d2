#include "gemmlab/plan_config.hpp"

#include <algorithm>
#include <istream>

#include "gemmlab/errors.hpp"
#include "gemmlab/numfmt.hpp"

namespace gemmlab {
namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(std::string_view(text).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

double parse_real(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return *v;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  const auto v = parse_unsigned(value);
  if (!v) throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  return *v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v(trim(value));
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

}  // namespace

Settings parse_settings(std::istream& in) {
  Settings settings;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("plan line " + std::to_string(row) + ": expected key = value", row, 0);
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) throw ParseError("plan line " + std::to_string(row) + ": empty key", row, 1);
    if (!settings.emplace(key, value).second) {
      throw ParseError("plan line " + std::to_string(row) + ": duplicate key '" + key + "'", row,
                       1);
    }
  }
  return settings;
}

const Settings& default_plan_settings() {
  static const Settings defaults = {
      {"sizes", "32,64,128,256,512,1024"},
      {"variants", "naive,parallel"},
      {"threads", "1,2,4,8,16"},
      {"tile", "32"},
      {"reps", "15"},
      {"pilot", "30"},
      {"warmup", "1"},
      {"seed", "1"},
      {"regenerate", "false"},
      {"alpha", "0.05"},
      {"power", "0.8"},
      {"effect_size", "0.5"},
  };
  return defaults;
}

bool is_plan_key(const std::string& key) { return default_plan_settings().contains(key); }

std::vector<Shape> parse_shape_list(const std::string& text) {
  std::vector<Shape> shapes;
  for (const auto& item : split_list(text)) shapes.push_back(parse_shape(item));
  if (shapes.empty()) throw ConfigError("size list is empty");
  return shapes;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> counts;
  for (const auto& item : split_list(text)) {
    const auto v = parse_unsigned(item);
    if (!v || *v == 0) throw ConfigError(what + ": '" + item + "' is not a positive integer");
    counts.push_back(*v);
  }
  if (counts.empty()) throw ConfigError(what + " list is empty");
  return counts;
}

std::vector<KernelVariant> parse_variant_list(const std::string& text,
                                              const std::vector<std::size_t>& tiles,
                                              const std::vector<std::size_t>& threads) {
  std::vector<KernelVariant> variants;
  auto add = [&](const KernelVariant& v) {
    if (std::find(variants.begin(), variants.end(), v) == variants.end()) variants.push_back(v);
  };
  for (const auto& item : split_list(text)) {
    if (item == "tiled") {
      for (auto t : tiles) add(KernelVariant::tiled(t));
    } else if (item == "parallel") {
      for (auto w : threads) add(KernelVariant::parallel(w));
    } else {
      add(parse_variant(item));
    }
  }
  if (variants.empty()) throw ConfigError("variant list is empty");
  return variants;
}

ExperimentPlan build_plan(const Settings& settings) {
  Settings s = default_plan_settings();
  for (const auto& [key, value] : settings) {
    if (!is_plan_key(key)) throw ConfigError("unknown plan key '" + key + "'");
    s[key] = value;
  }
  ExperimentPlan plan;
  plan.sizes = parse_shape_list(s["sizes"]);
  plan.variants = parse_variant_list(s["variants"], parse_count_list(s["tile"], "tile"),
                                     parse_count_list(s["threads"], "threads"));
  if (trim(s["reps"]) == "auto") {
    plan.reps.automatic = true;
  } else {
    plan.reps.count = parse_count("reps", s["reps"]);
  }
  plan.pilot_reps = parse_count("pilot", s["pilot"]);
  plan.warmup = parse_count("warmup", s["warmup"]);
  plan.seed = parse_count("seed", s["seed"]);
  plan.regenerate_per_rep = parse_bool("regenerate", s["regenerate"]);
  plan.power.alpha = parse_real("alpha", s["alpha"]);
  plan.power.power = parse_real("power", s["power"]);
  plan.power.effect_size = parse_real("effect_size", s["effect_size"]);
  validate(plan);
  return plan;
}

}  // namespace gemmlab
