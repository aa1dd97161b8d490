#pragma once

#include "dsparse/autodiff.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace testing_util {

using dsparse::Tensor;
using dsparse::ad::Tape;
using dsparse::ad::Var;

/// Central differences of a scalar function of one flat tensor.
inline std::vector<double> numeric_gradient(const std::function<double(const Tensor&)>& f, const Tensor& x,
                                            double h = 1e-5) {
    std::vector<double> g(x.numel());
    for (std::size_t i = 0; i < x.numel(); ++i) {
        std::vector<double> up = x.values(), down = x.values();
        up[i] += h;
        down[i] -= h;
        g[i] = (f(Tensor(x.shape(), up)) - f(Tensor(x.shape(), down))) / (2.0 * h);
    }
    return g;
}

/// Wraps a tape expression of one leaf as a plain function of its value.
inline std::function<double(const Tensor&)> as_function(const std::function<Var(Var)>& build) {
    return [build](const Tensor& x) {
        Tape tape;
        return build(tape.leaf(x)).value().item();
    };
}

inline double rel_err(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-3});
}

} // namespace testing_util
