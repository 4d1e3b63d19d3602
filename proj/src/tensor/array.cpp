#include "ltn/tensor/array.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ltn/error.hpp"

namespace ltn {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  return out + ")";
}

Array::Array() : data_(1, 0.0) {}

Array::Array(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Array::Array(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    throw ShapeError("array of shape " + shape_string(shape_) + " cannot hold " +
                     std::to_string(data_.size()) + " values");
  }
}

Array Array::scalar(double v) { return Array(Shape{}, {v}); }

Array Array::full(Shape shape, double v) {
  const auto n = shape_size(shape);
  return Array(std::move(shape), std::vector<double>(n, v));
}

Array Array::vector(std::vector<double> v) {
  const auto n = v.size();
  return Array(Shape{n}, std::move(v));
}

Array Array::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
  return Array(Shape{rows, cols}, std::move(data));
}

std::size_t Array::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_string(shape_));
  }
  return shape_[axis];
}

double Array::at(std::size_t row, std::size_t col) const {
  return data_[row * shape_.at(1) + col];
}

double& Array::at(std::size_t row, std::size_t col) {
  return data_[row * shape_.at(1) + col];
}

double Array::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item() on array of shape " + shape_string(shape_));
  }
  return data_[0];
}

bool Array::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Array Array::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Array(std::move(shape), data_);
}

Array Array::take_rows(std::span<const std::size_t> indices) const {
  if (shape_.empty()) throw ShapeError("take_rows on a scalar");
  const std::size_t stride = data_.size() / std::max<std::size_t>(shape_[0], 1);
  Shape out_shape = shape_;
  out_shape[0] = indices.size();
  std::vector<double> out;
  out.reserve(indices.size() * stride);
  for (auto r : indices) {
    if (r >= shape_[0]) throw ShapeError("row index " + std::to_string(r) + " out of range");
    out.insert(out.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * stride),
               data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * stride));
  }
  return Array(std::move(out_shape), std::move(out));
}

}  // namespace ltn
