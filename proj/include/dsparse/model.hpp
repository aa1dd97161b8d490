#pragma once

// Multilayer perceptron whose layers consume re-parameterized weights.
//
// Groups: for none and structured kinds every output neuron is a group made
// of its weight row plus its bias. The unstructured kind uses the whole
// weight matrix of the layer as one group and never touches the biases.
// Arch-param models gate each hidden neuron's fan-in (row and bias) by the
// architecture weight a_i of its layer.

#include "dsparse/arch_params.hpp"
#include "dsparse/autodiff.hpp"
#include "dsparse/data.hpp"
#include "dsparse/rng.hpp"
#include "dsparse/sparsify.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dsparse {

enum class Activation { relu, tanh };
std::string_view to_string(Activation a);
Activation parse_activation(std::string_view text);

enum class LossKind { mse, cross_entropy };
std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);

/// Mean squared error over all target entries, or mean softmax cross-entropy.
ad::Var prediction_loss(ad::Var output, const Dataset& batch, LossKind kind);

/// Per-layer sparsification; nullopt means the raw weights are used.
using LayerKind = std::optional<ReparamKind>;
std::string_view layer_kind_name(const LayerKind& kind);
LayerKind parse_layer_kind(std::string_view text);

struct ModelSpec {
    std::vector<std::size_t> layer_sizes; // input width first
    Activation activation = Activation::relu;
    std::vector<LayerKind> sparsify; // one entry per weight layer
    bool coarse_gradient = false;

    std::size_t num_layers() const { return layer_sizes.empty() ? 0 : layer_sizes.size() - 1; }
    bool any_sparsified() const;
    void validate() const;
};

struct LayerParams {
    std::string name;
    LayerKind kind;
    Tensor weight; // out x in
    Tensor bias;   // out
    std::vector<double> beta;  // per neuron (structured), one (unstructured), none otherwise
    std::vector<double> alpha; // per neuron for structured-scaled
    std::optional<ArchParamSet> gate;

    std::size_t fan_in() const { return weight.cols(); }
    std::size_t fan_out() const { return weight.rows(); }
    /// Weight row i followed by bias i.
    Tensor neuron_row(std::size_t i) const;
};

/// Tape leaves for one layer.
struct LayerLeaves {
    std::vector<ad::Var> rows; // row-grouped layers
    std::optional<ad::Var> weight, bias; // unstructured layers
    std::vector<ad::Var> beta, alpha;
    std::optional<ad::Var> gate_alpha, gate_beta;
};

struct ForwardPass {
    ad::Var output;
    std::vector<LayerLeaves> leaves;
    /// Augmented effective matrix [W~ | b] per layer, as consumed by forward.
    std::vector<ad::Var> effective;
    /// Groups seen by the regularizer (effective or raw per `regularize_raw`).
    std::vector<ad::Var> reg_groups;
    /// Architecture weights a per gated layer.
    std::vector<ad::Var> gates;
};

class Mlp {
public:
    Mlp() = default;
    Mlp(ModelSpec spec, std::vector<LayerParams> layers);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, and
    /// thresholds from `initial_beta`. `arch_gates` adds a gate set to every
    /// hidden layer.
    static Mlp initialize(const ModelSpec& spec, Rng& rng, bool arch_gates = false);

    const ModelSpec& spec() const { return spec_; }
    const std::vector<LayerParams>& layers() const { return layers_; }
    std::vector<LayerParams>& layers() { return layers_; }
    bool has_gates() const;

    ForwardPass forward(ad::Tape& tape, const Tensor& inputs, bool regularize_raw = false) const;

    /// In-place plain SGD update from gradients of a pass built by `forward`.
    void apply_gradients(const ForwardPass& pass, const ad::Gradients& grads, double learning_rate);

    Tensor predict(const Tensor& inputs) const;

    /// Augmented effective matrices [W~ | b], one per layer.
    std::vector<Tensor> effective_layers() const;
    /// Report groups: neuron rows of the effective matrix; for unstructured
    /// layers the bias column is excluded.
    SparsityReport sparsity() const;
    static SparsityReport sparsity_of(const std::vector<LayerParams>& layers, const std::vector<Tensor>& effective);

private:
    ModelSpec spec_;
    std::vector<LayerParams> layers_;
};

} // namespace dsparse
