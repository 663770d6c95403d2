#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gemmlab/harness.hpp"

namespace gemmlab {

/// Flat `key = value` settings. Blank lines and lines starting with '#' are
/// ignored. Later layers override earlier ones key by key.
using Settings = std::map<std::string, std::string>;

/// Parses a plan file. Throws ParseError on a line without '=', an empty key,
/// or a repeated key.
Settings parse_settings(std::istream& in);

/// Plan keys and their defaults:
///
///   sizes       = 32,64,128,256,512,1024   n or m:n:p, comma separated
///   variants    = naive,parallel           naive|prefetch|tiled[:T]|parallel[:W]
///   threads     = 1,2,4,8,16               worker counts for a bare "parallel"
///   tile        = 32                       tile sizes for a bare "tiled"
///   reps        = 15                       integer >= 2 or "auto"
///   pilot       = 30                       pilot repetitions in auto mode
///   warmup      = 1
///   seed        = 1
///   regenerate  = false                    fresh inputs every repetition
///   alpha       = 0.05
///   power       = 0.8
///   effect_size = 0.5
const Settings& default_plan_settings();

bool is_plan_key(const std::string& key);

/// Overlays `settings` on the defaults and builds a validated plan. Unknown
/// keys and malformed values throw ConfigError.
ExperimentPlan build_plan(const Settings& settings);

/// Comma list of shapes, e.g. "32,64,2:3:4".
std::vector<Shape> parse_shape_list(const std::string& text);

/// Expands a variant list; bare "tiled" and "parallel" fan out over `tiles`
/// and `threads` respectively. Duplicates are dropped, first occurrence wins.
std::vector<KernelVariant> parse_variant_list(const std::string& text,
                                              const std::vector<std::size_t>& tiles,
                                              const std::vector<std::size_t>& threads);

std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& what);

}  // namespace gemmlab
