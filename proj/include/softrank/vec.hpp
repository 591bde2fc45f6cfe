// Dense 64-bit vector/matrix value types. Construction validates finiteness
// once; afterwards the numeric code treats the buffers as plain arrays.
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "softrank/errors.hpp"

namespace softrank {

class Vec64 {
 public:
  Vec64() = default;
  explicit Vec64(std::size_t len, double fill = 0.0) : data_(len, fill) {
    if (len == 0) throw ParameterError("Vec64: length must be >= 1");
  }
  Vec64(std::initializer_list<double> xs) : data_(xs) {
    if (data_.empty()) throw ParameterError("Vec64: length must be >= 1");
    check_finite();
  }
  static Vec64 from(std::vector<double> xs) {
    if (xs.empty()) throw ParameterError("Vec64: length must be >= 1");
    Vec64 v;
    v.data_ = std::move(xs);
    v.check_finite();
    return v;
  }

  std::size_t len() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  const std::vector<double>& raw() const { return data_; }

  void check_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw ParameterError(detail::msg("Vec64: non-finite entry at index ", i));
      }
    }
  }

 private:
  std::vector<double> data_;
};

class Mat64 {
 public:
  Mat64() = default;
  Mat64(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw ParameterError("Mat64: dimensions must be >= 1");
  }
  static Mat64 from(std::size_t rows, std::size_t cols, std::vector<double> xs) {
    if (rows == 0 || cols == 0) throw ParameterError("Mat64: dimensions must be >= 1");
    if (xs.size() != rows * cols) {
      throw ShapeError(detail::msg("Mat64: data length ", xs.size(), " != ", rows, "x", cols));
    }
    Mat64 m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(xs);
    m.check_finite();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  const std::vector<double>& raw() const { return data_; }

  void check_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw ParameterError(detail::msg("Mat64: non-finite entry at flat index ", i));
      }
    }
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

}  // namespace softrank
