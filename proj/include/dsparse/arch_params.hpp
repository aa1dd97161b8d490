#pragma once

// Architecture-parameter sparsification baseline. Component weights are
//
//   gamma_i = exp(alpha_i)
//   gamma~_i = relu(gamma_i - sigmoid(beta) |gamma|_1)
//   a_i = gamma~_i / sum_j gamma~_j
//
// and a module output is y(x) = sum_i a_i f_i(x). When every gamma~_j is
// clamped the result is the all-zero vector.

#include "dsparse/autodiff.hpp"

#include <functional>
#include <span>
#include <vector>

namespace dsparse {

/// Guard added to the normalizer so a fully clamped set gives 0 / 1e-30 == 0.
inline constexpr double kArchNormalizerGuard = 1e-30;

struct ArchParamSet {
    Tensor alpha;
    double beta = -5.0;

    std::size_t size() const { return alpha.numel(); }
    static ArchParamSet uniform(std::size_t n, double beta = -5.0);
};

ad::Var arch_weights(ad::Var alpha, ad::Var beta, bool coarse = false);
Tensor arch_weights(const ArchParamSet& set);

/// (sum_i |a_i|^p)^(1/p), smoothed as in group_pnorm.
ad::Var arch_pnorm_reg(ad::Var a, double p);

using Component = std::function<ad::Var(ad::Var)>;

ad::Var modular_forward(ad::Var x, ad::Var a, std::span<const Component> components);

} // namespace dsparse
