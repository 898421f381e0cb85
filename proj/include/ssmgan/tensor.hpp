#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "ssmgan/error.hpp"

namespace ssmgan {

// Strided view over a time-major [rows][cols] block of floats. `stride` is the
// distance between consecutive rows and may exceed `cols` for column slices.
template <typename T>
class BasicMatrixView {
 public:
  BasicMatrixView() = default;
  BasicMatrixView(T* data, std::size_t rows, std::size_t cols)
      : data_(data), rows_(rows), cols_(cols), stride_(cols) {}
  BasicMatrixView(T* data, std::size_t rows, std::size_t cols, std::size_t stride)
      : data_(data), rows_(rows), cols_(cols), stride_(stride) {}

  // Allow MatrixView -> ConstMatrixView.
  template <typename U>
    requires std::is_convertible_v<U*, T*>
  BasicMatrixView(const BasicMatrixView<U>& other)  // NOLINT
      : data_(other.data()), rows_(other.rows()), cols_(other.cols()), stride_(other.stride()) {}

  T* data() const { return data_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t stride() const { return stride_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  std::span<T> row(std::size_t t) const { return {data_ + t * stride_, cols_}; }
  T& operator()(std::size_t t, std::size_t c) const { return data_[t * stride_ + c]; }

  BasicMatrixView rows_slice(std::size_t first, std::size_t count) const {
    return {data_ + first * stride_, count, cols_, stride_};
  }
  BasicMatrixView cols_slice(std::size_t first, std::size_t count) const {
    return {data_ + first, rows_, count, stride_};
  }

 private:
  T* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
};

using MatrixView = BasicMatrixView<float>;
using ConstMatrixView = BasicMatrixView<const float>;

// Owning, contiguous [rows][cols] float matrix. Rows are time steps.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw ShapeError("matrix data size does not match shape");
  }
  explicit Matrix(ConstMatrixView v) : Matrix(v.rows(), v.cols()) {
    for (std::size_t t = 0; t < rows_; ++t) {
      auto src = v.row(t);
      std::copy(src.begin(), src.end(), data_.begin() + static_cast<std::ptrdiff_t>(t * cols_));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  const std::vector<float>& values() const { return data_; }

  std::span<float> row(std::size_t t) { return {data_.data() + t * cols_, cols_}; }
  std::span<const float> row(std::size_t t) const { return {data_.data() + t * cols_, cols_}; }
  float& operator()(std::size_t t, std::size_t c) { return data_[t * cols_ + c]; }
  float operator()(std::size_t t, std::size_t c) const { return data_[t * cols_ + c]; }

  MatrixView view() { return {data_.data(), rows_, cols_}; }
  ConstMatrixView view() const { return {data_.data(), rows_, cols_}; }
  operator MatrixView() { return view(); }             // NOLINT
  operator ConstMatrixView() const { return view(); }  // NOLINT

  void fill(float v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

// Stack rows of `parts` (all with the same width) into one matrix.
Matrix concat_rows(std::span<const Matrix> parts);

}  // namespace ssmgan
