#pragma once

// Reverse-mode automatic differentiation over a define-by-run tape.
//
// A Tape is rebuilt for every forward pass. Leaves are trainable inputs,
// constants never receive gradients, and every operation appends a Node whose
// backward rule maps the upstream gradient to one gradient per input.
// Element-wise binary operations broadcast only when one operand is a scalar.

#include "dsparse/tensor.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsparse::ad {

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

using BackwardFn = std::function<std::vector<Tensor>(const Tape&, const Tensor& upstream)>;

struct Node {
    std::size_t id = 0;
    std::string op;
    std::vector<std::size_t> inputs;
    Tensor value;
    bool is_leaf = false;
    bool requires_grad = false;
    BackwardFn backward;
};

/// Gradient of a scalar root with respect to tape nodes. Every leaf has an
/// entry (zeros when the root does not depend on it).
class Gradients {
public:
    explicit Gradients(std::vector<std::optional<Tensor>> grads) : grads_(std::move(grads)) {}

    bool contains(std::size_t id) const { return id < grads_.size() && grads_[id].has_value(); }
    const Tensor& at(std::size_t id) const;
    const Tensor& operator[](Var v) const { return at(v.id); }

private:
    std::vector<std::optional<Tensor>> grads_;
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) = default;
    Tape& operator=(Tape&&) = default;

    Var leaf(Tensor value, std::string name = "leaf");
    Var constant(Tensor value);
    Var constant(double value) { return constant(Tensor::scalar(value)); }

    /// Appends an operation node. `inputs` must already be on this tape.
    Var record(std::string op, std::vector<std::size_t> inputs, Tensor value, BackwardFn backward);

    const Node& node(std::size_t id) const { return nodes_.at(id); }
    const Tensor& value(Var v) const { return node(v.id).value; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Reverse accumulation from a scalar root.
    Gradients backward(Var root) const;

private:
    std::deque<Node> nodes_;
};

/// Element-wise scalar function paired with its derivative.
struct ElementwiseFn {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

ElementwiseFn relu_fn();
/// elu with alpha = 1.
ElementwiseFn elu_fn();

// Element-wise arithmetic (equal shapes or one scalar operand).
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);

Var neg(Var x);
Var abs(Var x);
/// sign(0) = 0; the derivative is zero everywhere.
Var sign(Var x);
Var exp(Var x);
Var log(Var x);
Var sigmoid(Var x);
/// relu'(0) = 0.
Var relu(Var x);
Var elu(Var x);
Var tanh(Var x);
Var square(Var x);
Var sqrt(Var x);
Var pow(Var x, double exponent);

/// Maps -0.0 to +0.0; gradient passes through unchanged.
Var canonical_zero(Var x);

/// Forward applies `forward.value`; backward multiplies the upstream gradient
/// by `backward.derivative` evaluated at the input, whatever `forward` is.
Var custom_grad(Var x, const ElementwiseFn& forward, const ElementwiseFn& backward);

Var sum(Var x);
Var mean(Var x);
Var sum_squares(Var x);
/// Euclidean norm with subgradient 0 at the origin.
Var norm2(Var x);

Var matmul(Var a, Var b);
Var transpose(Var m);
Var reshape(Var x, Shape shape);
/// Stacks equal-length tensors as the rows of a matrix.
Var stack_rows(std::span<const Var> rows);
/// Concatenates tensors into one flat vector.
Var concat(std::span<const Var> parts);
/// Joins two matrices with equal row counts side by side.
Var hcat(Var a, Var b);
/// Appends a constant column of ones to a matrix.
Var append_ones_col(Var m);
/// m[i, j] * v[j].
Var scale_cols(Var m, Var v);

Var mse(Var prediction, const Tensor& target);
/// Mean negative log-likelihood of integer class labels under softmax(logits).
Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels);

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var x);
Var operator+(Var a, double b);
Var operator-(Var a, double b);
Var operator*(Var a, double b);
Var operator/(Var a, double b);
Var operator+(double a, Var b);
Var operator-(double a, Var b);
Var operator*(double a, Var b);

} // namespace dsparse::ad
