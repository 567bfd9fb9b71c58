#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace scgan::nn {

/// Row-major view over a block of doubles owned elsewhere.
template <typename T>
struct BasicMatrixView {
  std::span<T> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  T& operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<T> row(std::size_t r) const { return values.subspan(r * cols, cols); }

  operator BasicMatrixView<const T>() const
    requires(!std::is_const_v<T>)
  {
    return {values, rows, cols};
  }
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

/// Owning dense matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  MatrixView view() { return {values_, rows_, cols_}; }
  ConstMatrixView view() const { return {values_, rows_, cols_}; }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// One named tensor inside a flat parameter vector.
struct TensorSlot {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool decays = true;  // weights take L2, biases do not

  std::size_t size() const { return rows * cols; }
};

/// Table of tensors laid out back to back in one flat buffer. Networks keep
/// their parameters, gradients and optimizer moments in buffers of this shape.
class ParameterLayout {
 public:
  std::size_t add(std::string name, std::size_t rows, std::size_t cols, bool decays);

  std::size_t total() const { return total_; }
  const std::vector<TensorSlot>& slots() const { return slots_; }
  const TensorSlot& slot(std::size_t i) const { return slots_[i]; }

  MatrixView view(std::span<double> buffer, std::size_t i) const;
  ConstMatrixView view(std::span<const double> buffer, std::size_t i) const;

  /// 0.5 * sum of squares over decaying tensors.
  double half_squared_norm(std::span<const double> buffer) const;
  /// grad += l2 * w over decaying tensors.
  void add_l2_gradient(std::span<const double> params, std::span<double> grad, double l2) const;

  friend bool operator==(const ParameterLayout&, const ParameterLayout&);

 private:
  std::vector<TensorSlot> slots_;
  std::size_t total_ = 0;
};

bool operator==(const TensorSlot& a, const TensorSlot& b);

}  // namespace scgan::nn
