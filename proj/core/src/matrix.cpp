#include "gemmlab/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "gemmlab/errors.hpp"
#include "gemmlab/numfmt.hpp"

namespace gemmlab {
namespace {

constexpr double kNormFloor = 1e-300;

std::size_t checked_extent(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix extents must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  const std::size_t limit = std::vector<double>().max_size();
  if (rows > limit / cols) {
    throw DimensionError("matrix extents " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " overflow the addressable element count");
  }
  return rows * cols;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(checked_extent(rows, cols), 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != checked_extent(rows, cols)) {
    throw DimensionError("matrix data holds " + std::to_string(data_.size()) +
                         " elements, expected " + std::to_string(rows * cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool operator==(const Matrix& a, const Matrix& b) noexcept {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t i = 0; i < a.data_.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.data_[i]) != std::bit_cast<std::uint64_t>(b.data_[i])) {
      return false;
    }
  }
  return true;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

namespace {

// Scaled sum of squares so that tiny or huge entries neither underflow nor
// overflow.
template <typename Element>
double scaled_norm(std::size_t count, Element element) {
  double scale = 0.0;
  for (std::size_t i = 0; i < count; ++i) scale = std::max(scale, std::abs(element(i)));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = element(i) / scale;
    sum += x * x;
  }
  return scale * std::sqrt(sum);
}

}  // namespace

double frobenius_norm(const Matrix& a) {
  const auto d = a.data();
  return scaled_norm(d.size(), [&](std::size_t i) { return d[i]; });
}

double relative_frobenius_error(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  const auto da = a.data();
  const auto db = b.data();
  const double diff = scaled_norm(da.size(), [&](std::size_t i) { return da[i] - db[i]; });
  return diff / std::max({frobenius_norm(a), frobenius_norm(b), kNormFloor});
}

bool approx_equal(const Matrix& a, const Matrix& b, double rel_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  // Exact equality short-circuits so comparison stays reflexive even for
  // matrices whose squared norm overflows.
  if (a == b) return true;
  return relative_frobenius_error(a, b) <= rel_tol;
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::abs(da[i] - db[i]));
  return worst;
}

void write_csv(const Matrix& m, std::ostream& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j != 0) out << ',';
      out << format_roundtrip(r[j]);
    }
    out << '\n';
  }
}

Matrix read_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // Blank lines are tolerated only at the end of the file.
      std::string rest;
      while (std::getline(in, rest)) {
        if (!trim(rest).empty()) {
          throw ParseError("blank line inside matrix at row " + std::to_string(rows + 1), rows + 1,
                           0);
        }
      }
      break;
    }
    ++rows;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view token =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                            : comma - start);
      ++col;
      const auto value = parse_double(token);
      if (!value) {
        throw ParseError("unparseable token '" + std::string(token) + "' at row " +
                             std::to_string(rows) + ", column " + std::to_string(col),
                         rows, col);
      }
      values.push_back(*value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 1) {
      cols = col;
    } else if (col != cols) {
      throw ParseError("ragged row " + std::to_string(rows) + ": expected " +
                           std::to_string(cols) + " columns, found " + std::to_string(col),
                       rows, col);
    }
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading matrix");
  if (rows == 0) throw ParseError("matrix file is empty", 0, 0);
  return Matrix(rows, cols, std::move(values));
}

void save_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(m, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing matrix to '" + path.string() + "'");
}

Matrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return read_csv(in);
}

}  // namespace gemmlab
