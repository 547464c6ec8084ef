#pragma once

#include <cstddef>
#include <vector>

namespace sympal {

// Dense real matrix, row-major. The one carrier type for symmetric forms,
// symplectic maps and orthogonal frames. Constructors reject NaN/Inf.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return entries_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  const std::vector<double>& entries() const noexcept { return entries_; }

  std::vector<double> column(std::size_t j) const;
  void set_column(std::size_t j, const std::vector<double>& v);

  // Rows `ri`, columns `ci`, in the given order.
  Matrix submatrix(const std::vector<std::size_t>& ri,
                   const std::vector<std::size_t>& ci) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double c, const Matrix& a);
std::vector<double> operator*(const Matrix& a, const std::vector<double>& x);

Matrix transpose(const Matrix& a);
Matrix from_columns(std::size_t rows, const std::vector<std::vector<double>>& cols);

// Entrywise max-abs norm; the toolkit's default scale measure.
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);

double dot(const std::vector<double>& x, const std::vector<double>& y);
double norm2(const std::vector<double>& x);

// max(1, entrywise max-abs): the factor every relative tolerance is scaled by.
double norm_scale(const Matrix& a);

}  // namespace sympal
