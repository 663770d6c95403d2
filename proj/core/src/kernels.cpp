#include "gemmlab/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include "gemmlab/errors.hpp"
#include "gemmlab/numfmt.hpp"

namespace gemmlab {
namespace {

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_conformable(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("cannot multiply " + shape_string(a) + " by " + shape_string(b) +
                         ": inner dimensions differ");
  }
}

// Naive loop restricted to output rows [begin, end).
void naive_rows(const Matrix& a, const Matrix& b, Matrix& c, std::size_t begin, std::size_t end) {
  const std::size_t n = a.cols();
  const std::size_t p = b.cols();
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  double* cd = c.data().data();
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += ad[i * n + k] * bd[k * p + j];
      cd[i * p + j] = acc;
    }
  }
}

}  // namespace

KernelVariant KernelVariant::tiled(std::size_t tile) {
  if (tile == 0) throw ConfigError("tile size must be at least 1");
  return {KernelKind::tiled, tile, 0};
}

KernelVariant KernelVariant::parallel(std::size_t workers) {
  if (workers == 0) throw ConfigError("worker count must be at least 1");
  return {KernelKind::parallel, 0, workers};
}

const char* kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::naive: return "naive";
    case KernelKind::prefetch: return "prefetch";
    case KernelKind::tiled: return "tiled";
    case KernelKind::parallel: return "parallel";
  }
  return "unknown";
}

KernelKind parse_kind(const std::string& name) {
  for (auto kind : {KernelKind::naive, KernelKind::prefetch, KernelKind::tiled,
                    KernelKind::parallel}) {
    if (name == kind_name(kind)) return kind;
  }
  throw ConfigError("unknown kernel variant '" + name + "'");
}

std::string describe(const KernelVariant& v) {
  switch (v.kind) {
    case KernelKind::tiled: return "tiled:" + std::to_string(v.tile);
    case KernelKind::parallel: return "parallel:" + std::to_string(v.workers);
    default: return kind_name(v.kind);
  }
}

KernelVariant parse_variant(const std::string& text) {
  const auto colon = text.find(':');
  const KernelKind kind = parse_kind(std::string(trim(text.substr(0, colon))));
  std::optional<unsigned long long> param;
  if (colon != std::string::npos) {
    param = parse_unsigned(text.substr(colon + 1));
    if (!param || *param == 0) throw ConfigError("bad parameter in variant '" + text + "'");
  }
  switch (kind) {
    case KernelKind::naive:
    case KernelKind::prefetch:
      if (param) throw ConfigError("variant '" + text + "' takes no parameter");
      return {kind, 0, 0};
    case KernelKind::tiled:
      return KernelVariant::tiled(param ? *param : kDefaultTile);
    case KernelKind::parallel:
      if (!param) throw ConfigError("variant 'parallel' needs a worker count, e.g. parallel:4");
      return KernelVariant::parallel(*param);
  }
  throw ConfigError("unknown kernel variant '" + text + "'");
}

std::vector<RowRange> partition_rows(std::size_t rows, std::size_t workers) {
  if (workers == 0) throw ConfigError("worker count must be at least 1");
  const std::size_t block = (rows + workers - 1) / workers;
  std::vector<RowRange> ranges;
  ranges.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(rows, w * block);
    const std::size_t end = std::min(rows, begin + block);
    ranges.push_back({begin, end});
  }
  return ranges;
}

Matrix matmul_naive(const Matrix& a, const Matrix& b) {
  check_conformable(a, b);
  Matrix c(a.rows(), b.cols());
  naive_rows(a, b, c, 0, a.rows());
  return c;
}

Matrix matmul_prefetch(const Matrix& a, const Matrix& b) {
  check_conformable(a, b);
  const Matrix bt = transpose(b);
  const std::size_t n = a.cols();
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i).data();
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const double* bcol = bt.row(j).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += arow[k] * bcol[k];
      c(i, j) = acc;
    }
  }
  return c;
}

Matrix matmul_tiled(const Matrix& a, const Matrix& b, std::size_t tile) {
  check_conformable(a, b);
  if (tile == 0) throw DimensionError("tile size must be at least 1");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t p = b.cols();
  Matrix c(m, p);
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  double* cd = c.data().data();
  for (std::size_t ii = 0; ii < m; ii += tile) {
    const std::size_t i_end = std::min(ii + tile, m);
    for (std::size_t jj = 0; jj < p; jj += tile) {
      const std::size_t j_end = std::min(jj + tile, p);
      for (std::size_t kk = 0; kk < n; kk += tile) {
        const std::size_t k_end = std::min(kk + tile, n);
        for (std::size_t i = ii; i < i_end; ++i) {
          for (std::size_t k = kk; k < k_end; ++k) {
            const double aik = ad[i * n + k];
            for (std::size_t j = jj; j < j_end; ++j) cd[i * p + j] += aik * bd[k * p + j];
          }
        }
      }
    }
  }
  return c;
}

Matrix matmul_parallel(const Matrix& a, const Matrix& b, std::size_t workers) {
  check_conformable(a, b);
  Matrix c(a.rows(), b.cols());
  const auto ranges = partition_rows(a.rows(), workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    // The calling thread takes the first block; surplus workers get empty
    // ranges and are not started.
    for (std::size_t w = 1; w < ranges.size(); ++w) {
      if (ranges[w].size() == 0) continue;
      pool.emplace_back([&, r = ranges[w]] { naive_rows(a, b, c, r.begin, r.end); });
    }
    naive_rows(a, b, c, ranges[0].begin, ranges[0].end);
  }
  return c;
}

Matrix multiply(const KernelVariant& variant, const Matrix& a, const Matrix& b) {
  switch (variant.kind) {
    case KernelKind::naive: return matmul_naive(a, b);
    case KernelKind::prefetch: return matmul_prefetch(a, b);
    case KernelKind::tiled: return matmul_tiled(a, b, variant.tile);
    case KernelKind::parallel: return matmul_parallel(a, b, variant.workers);
  }
  throw ConfigError("unknown kernel variant");
}

}  // namespace gemmlab
