#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gemmlab/matrix.hpp"

namespace gemmlab {

enum class KernelKind { naive, prefetch, tiled, parallel };

inline constexpr std::size_t kDefaultTile = 32;

// A multiplication strategy plus its parameter. `tile` is meaningful only for
// tiled and `workers` only for parallel; both are zero otherwise.
struct KernelVariant {
  KernelKind kind = KernelKind::naive;
  std::size_t tile = 0;
  std::size_t workers = 0;

  static KernelVariant naive() { return {KernelKind::naive, 0, 0}; }
  static KernelVariant prefetch() { return {KernelKind::prefetch, 0, 0}; }
  static KernelVariant tiled(std::size_t tile = kDefaultTile);
  static KernelVariant parallel(std::size_t workers);

  friend bool operator==(const KernelVariant&, const KernelVariant&) = default;
  friend auto operator<=>(const KernelVariant&, const KernelVariant&) = default;
};

const char* kind_name(KernelKind kind);
KernelKind parse_kind(const std::string& name);  // throws ConfigError

/// "naive", "prefetch", "tiled:32", "parallel:4".
std::string describe(const KernelVariant& v);
/// Inverse of describe(). A bare "tiled" uses the default tile; a bare
/// "parallel" is rejected because its worker count has no default here.
KernelVariant parse_variant(const std::string& text);

/// Half-open row interval [begin, end).
struct RowRange {
  std::size_t begin;
  std::size_t end;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// Splits `rows` into `workers` contiguous blocks of ceil(rows / workers);
/// the last non-empty block may be short and trailing blocks may be empty.
std::vector<RowRange> partition_rows(std::size_t rows, std::size_t workers);

/// C = A * B with an i-j-k loop nest and one scalar accumulator per element,
/// summing k in ascending order. This is the reference every other kernel is
/// checked against.
Matrix matmul_naive(const Matrix& a, const Matrix& b);

/// Transposes B once (inside the call) so that each dot product walks two
/// contiguous rows. Same accumulation order as naive: results are bit-equal.
Matrix matmul_prefetch(const Matrix& a, const Matrix& b);

/// Blocked i/j/k loops with square tiles of side `tile`; edge tiles are
/// partial. Partial sums go straight into C.
Matrix matmul_tiled(const Matrix& a, const Matrix& b, std::size_t tile = kDefaultTile);

/// Row-block decomposition over `workers` threads (see partition_rows). Each
/// worker runs the naive loop on its own rows, so the result is bit-equal to
/// matmul_naive for any worker count. Returns after every worker finishes.
Matrix matmul_parallel(const Matrix& a, const Matrix& b, std::size_t workers);

Matrix multiply(const KernelVariant& variant, const Matrix& a, const Matrix& b);

}  // namespace gemmlab
