#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmcwsim/errors.hpp"

namespace fmcwsim {

/// Dense row-major 2D array.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * cols_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const { return data_[row * cols_ + col]; }

  T& at(std::size_t row, std::size_t col) {
    check(row, col);
    return (*this)(row, col);
  }
  const T& at(std::size_t row, std::size_t col) const {
    check(row, col);
    return (*this)(row, col);
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  void check(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw OutOfRangeError("raster index out of range");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace fmcwsim
