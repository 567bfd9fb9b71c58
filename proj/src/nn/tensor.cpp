#include "scgan/nn/tensor.h"

#include <cmath>
#include <stdexcept>

namespace scgan::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: " + std::to_string(values_.size()) + " values for a " +
                                std::to_string(rows) + "x" + std::to_string(cols) + " shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t ParameterLayout::add(std::string name, std::size_t rows, std::size_t cols,
                                 bool decays) {
  slots_.push_back(TensorSlot{std::move(name), total_, rows, cols, decays});
  total_ += rows * cols;
  return slots_.size() - 1;
}

MatrixView ParameterLayout::view(std::span<double> buffer, std::size_t i) const {
  const auto& s = slots_[i];
  return {buffer.subspan(s.offset, s.size()), s.rows, s.cols};
}

ConstMatrixView ParameterLayout::view(std::span<const double> buffer, std::size_t i) const {
  const auto& s = slots_[i];
  return {buffer.subspan(s.offset, s.size()), s.rows, s.cols};
}

double ParameterLayout::half_squared_norm(std::span<const double> buffer) const {
  double sum = 0.0;
  for (const auto& s : slots_) {
    if (!s.decays) continue;
    for (std::size_t k = s.offset; k < s.offset + s.size(); ++k) sum += buffer[k] * buffer[k];
  }
  return 0.5 * sum;
}

void ParameterLayout::add_l2_gradient(std::span<const double> params, std::span<double> grad,
                                      double l2) const {
  if (l2 == 0.0) return;
  for (const auto& s : slots_) {
    if (!s.decays) continue;
    for (std::size_t k = s.offset; k < s.offset + s.size(); ++k) grad[k] += l2 * params[k];
  }
}

bool operator==(const TensorSlot& a, const TensorSlot& b) {
  return a.name == b.name && a.offset == b.offset && a.rows == b.rows && a.cols == b.cols &&
         a.decays == b.decays;
}

bool operator==(const ParameterLayout& a, const ParameterLayout& b) {
  return a.total_ == b.total_ && a.slots_ == b.slots_;
}

}  // namespace scgan::nn
