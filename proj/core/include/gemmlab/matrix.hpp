#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace gemmlab {

/// Dense row-major matrix of doubles. Element (i, j) lives at i * cols + j.
///
/// Both extents are at least 1 and the storage length always equals
/// rows * cols.
class Matrix {
 public:
  /// rows x cols matrix of zeros. Throws DimensionError for zero extents or
  /// when rows * cols does not fit in the address space.
  Matrix(std::size_t rows, std::size_t cols);

  /// Adopts `data` as the row-major contents; its size must be rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) noexcept {
    return std::span<double>(data_).subspan(i * cols_, cols_);
  }

  /// Bit-level equality of shape and every element (distinguishes -0.0/0.0).
  friend bool operator==(const Matrix& a, const Matrix& b) noexcept;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

double frobenius_norm(const Matrix& a);

/// Relative Frobenius distance ||a - b||_F / max(||a||_F, ||b||_F, 1e-300).
/// Symmetric in its arguments.
/// Returns +inf when the shapes differ.
double relative_frobenius_error(const Matrix& a, const Matrix& b);

/// True iff shapes match and relative_frobenius_error(a, b) <= rel_tol.
bool approx_equal(const Matrix& a, const Matrix& b, double rel_tol);

/// Largest |a(i,j) - b(i,j)|; +inf when the shapes differ.
double max_abs_difference(const Matrix& a, const Matrix& b);

// CSV: one row per line, comma separated, no header. Values are written in
// shortest round-trip form so save/load is bit-exact.
void write_csv(const Matrix& m, std::ostream& out);
Matrix read_csv(std::istream& in);

void save_csv(const Matrix& m, const std::filesystem::path& path);
Matrix load_csv(const std::filesystem::path& path);

}  // namespace gemmlab
