#include "dsparse/arch_params.hpp"

#include "dsparse/errors.hpp"
#include "dsparse/regularize.hpp"
#include "dsparse/sparsify.hpp"

#include <optional>

namespace dsparse {

ArchParamSet ArchParamSet::uniform(std::size_t n, double beta) {
    if (n == 0) throw std::invalid_argument("ArchParamSet needs at least one component");
    return {Tensor::zeros({n}), beta};
}

ad::Var arch_weights(ad::Var alpha, ad::Var beta, bool coarse) {
    ad::Var gamma = ad::exp(alpha);
    ad::Var clipped = threshold_relu(gamma - ad::sigmoid(beta) * ad::sum(gamma), coarse);
    return clipped / (ad::sum(clipped) + kArchNormalizerGuard);
}

Tensor arch_weights(const ArchParamSet& set) {
    ad::Tape tape;
    return arch_weights(tape.leaf(set.alpha), tape.leaf(Tensor::scalar(set.beta))).value();
}

ad::Var arch_pnorm_reg(ad::Var a, double p) { return smoothed_pnorm(a, p); }

ad::Var modular_forward(ad::Var x, ad::Var a, std::span<const Component> components) {
    if (components.empty()) throw std::invalid_argument("modular_forward: no components");
    if (a.value().numel() != components.size()) {
        throw ShapeError("modular_forward: " + std::to_string(a.value().numel()) + " weights for " +
                         std::to_string(components.size()) + " components");
    }
    ad::Tape& tape = *x.tape;
    std::optional<ad::Var> total;
    std::optional<Shape> shape;
    for (std::size_t i = 0; i < components.size(); ++i) {
        ad::Var y = components[i](x);
        if (shape && *shape != y.shape()) {
            throw ShapeError("modular_forward: component outputs differ, " + to_string(*shape) + " vs " +
                             to_string(y.shape()));
        }
        shape = y.shape();
        // a_i as a scalar node so broadcasting applies.
        std::vector<double> pick(components.size(), 0.0);
        pick[i] = 1.0;
        ad::Var ai = ad::sum(a * tape.constant(Tensor(a.shape(), std::move(pick))));
        ad::Var term = ai * y;
        total = total ? *total + term : term;
    }
    return ad::canonical_zero(*total);
}

} // namespace dsparse
