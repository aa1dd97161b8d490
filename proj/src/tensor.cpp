#include "dsparse/tensor.hpp"

#include "dsparse/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace dsparse {

std::string to_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << ", ";
        out << shape[i];
    }
    out << ']';
    return out.str();
}

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto e : shape) n *= e;
    return n;
}

namespace {

void validate(const Shape& shape, const std::vector<double>& data) {
    if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
    for (auto e : shape) {
        if (e == 0) throw ShapeError("tensor extents must be positive, got " + to_string(shape));
    }
    if (shape_numel(shape) != data.size()) {
        throw ShapeError("shape " + to_string(shape) + " does not match " +
                         std::to_string(data.size()) + " elements");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw NonFiniteError("non-finite tensor element at index " + std::to_string(i));
        }
    }
}

} // namespace

Tensor::Tensor() : shape_{1}, data_{0.0} {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    validate(shape_, data_);
}

Tensor::Tensor(std::initializer_list<double> values)
    : Tensor(Shape{values.size()}, std::vector<double>(values)) {}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::vector(std::vector<double> values) {
    Shape shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

double Tensor::at(std::size_t row, std::size_t col) const {
    if (rank() != 2) throw ShapeError("at(row, col) requires a matrix, got " + to_string(shape_));
    return data_[row * shape_[1] + col];
}

double Tensor::item() const {
    if (!is_scalar()) throw ShapeError("item() requires a scalar, got " + to_string(shape_));
    return data_[0];
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw ShapeError("rows() requires a matrix, got " + to_string(shape_));
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw ShapeError("cols() requires a matrix, got " + to_string(shape_));
    return shape_[1];
}

Tensor Tensor::reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) return false;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
}

bool is_bitwise_zero(double x) noexcept {
    return (std::bit_cast<std::uint64_t>(x) << 1) == 0;
}

} // namespace dsparse
