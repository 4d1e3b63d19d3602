#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ltn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles. A rank-0 array holds one scalar.
class Array {
 public:
  Array();
  explicit Array(Shape shape);
  Array(Shape shape, std::vector<double> data);

  static Array scalar(double v);
  static Array full(Shape shape, double v);
  static Array zeros(Shape shape) { return full(std::move(shape), 0.0); }
  static Array vector(std::vector<double> v);
  static Array matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const;

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t row, std::size_t col) const;
  double& at(std::size_t row, std::size_t col);

  /// Value of a single-element array.
  double item() const;

  bool all_finite() const;
  Array reshaped(Shape shape) const;
  /// Rows `indices` of the leading axis.
  Array take_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const Array&, const Array&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace ltn
