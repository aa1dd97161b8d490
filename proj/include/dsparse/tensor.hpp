#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dsparse {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Dense row-major array of doubles.
///
/// Every constructor validates that the shape has positive extents, that the
/// element count matches, and that all elements are finite. A scalar is a
/// tensor with a single element (shape `{1}` unless built otherwise).
class Tensor {
public:
    Tensor();
    Tensor(Shape shape, std::vector<double> data);
    Tensor(std::initializer_list<double> values);

    static Tensor scalar(double value);
    static Tensor zeros(Shape shape);
    static Tensor filled(Shape shape, double value);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t numel() const noexcept { return data_.size(); }
    bool is_scalar() const noexcept { return data_.size() == 1; }

    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double at(std::size_t row, std::size_t col) const;
    double item() const;

    std::size_t rows() const;
    std::size_t cols() const;

    /// Rebinds the shape; element count must match.
    Tensor reshaped(Shape shape) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// True when both tensors have the same shape and every element has an
/// identical bit pattern.
bool bitwise_equal(const Tensor& a, const Tensor& b);

bool is_bitwise_zero(double x) noexcept;

} // namespace dsparse
