#include "dsparse/model.hpp"

#include "dsparse/errors.hpp"

#include <cmath>

namespace dsparse {

std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(std::string_view text) {
    if (text == "relu") return Activation::relu;
    if (text == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + std::string(text) + "'", "activation");
}

std::string_view to_string(LossKind kind) { return kind == LossKind::mse ? "mse" : "cross-entropy"; }

LossKind parse_loss_kind(std::string_view text) {
    if (text == "mse") return LossKind::mse;
    if (text == "cross-entropy") return LossKind::cross_entropy;
    throw ConfigError("unknown loss '" + std::string(text) + "'", "loss");
}

ad::Var prediction_loss(ad::Var output, const Dataset& batch, LossKind kind) {
    if (kind == LossKind::mse) return ad::mse(output, batch.targets);
    const auto labels = batch.labels();
    return ad::softmax_cross_entropy(output, labels);
}

std::string_view layer_kind_name(const LayerKind& kind) { return kind ? to_string(*kind) : "none"; }

LayerKind parse_layer_kind(std::string_view text) {
    if (text == "none") return std::nullopt;
    return parse_reparam_kind(text);
}

bool ModelSpec::any_sparsified() const {
    for (const auto& k : sparsify) {
        if (k) return true;
    }
    return false;
}

void ModelSpec::validate() const {
    if (layer_sizes.size() < 2) throw ConfigError("layer_sizes needs an input and at least one layer", "layer_sizes");
    for (auto s : layer_sizes) {
        if (s == 0) throw ConfigError("layer_sizes entries must be positive", "layer_sizes");
    }
    if (sparsify.size() != num_layers()) {
        throw ConfigError("sparsify_kind has " + std::to_string(sparsify.size()) + " entries for " +
                              std::to_string(num_layers()) + " layers",
                          "sparsify_kind");
    }
}

Tensor LayerParams::neuron_row(std::size_t i) const {
    const std::size_t in = fan_in();
    std::vector<double> row(weight.data().begin() + static_cast<std::ptrdiff_t>(i * in),
                            weight.data().begin() + static_cast<std::ptrdiff_t>((i + 1) * in));
    row.push_back(bias[i]);
    return Tensor::vector(std::move(row));
}

Mlp::Mlp(ModelSpec spec, std::vector<LayerParams> layers) : spec_(std::move(spec)), layers_(std::move(layers)) {
    spec_.validate();
    if (layers_.size() != spec_.num_layers()) throw ShapeError("layer parameter count does not match the model spec");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& p = layers_[l];
        const Shape expected{spec_.layer_sizes[l + 1], spec_.layer_sizes[l]};
        if (p.weight.shape() != expected || p.bias.numel() != expected[0]) {
            throw ShapeError(p.name + ": weight " + to_string(p.weight.shape()) + " does not match spec " +
                             to_string(expected));
        }
        std::size_t betas = 0, alphas = 0;
        if (p.kind == ReparamKind::unstructured) betas = 1;
        if (p.kind == ReparamKind::structured_exp || p.kind == ReparamKind::structured_scaled) betas = expected[0];
        if (p.kind == ReparamKind::structured_scaled) alphas = expected[0];
        if (p.beta.size() != betas || p.alpha.size() != alphas) {
            throw ShapeError(p.name + ": threshold parameter count does not match kind " +
                             std::string(layer_kind_name(p.kind)));
        }
        if (p.gate && p.gate->size() != expected[0]) throw ShapeError(p.name + ": gate size mismatch");
    }
}

Mlp Mlp::initialize(const ModelSpec& spec, Rng& rng, bool arch_gates) {
    spec.validate();
    std::vector<LayerParams> layers;
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        const std::size_t in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::vector<double> w(out * in);
        for (auto& v : w) v = rng.uniform(-bound, bound);

        LayerParams p;
        p.name = "layer" + std::to_string(l);
        p.kind = spec.sparsify[l];
        p.weight = Tensor::matrix(out, in, std::move(w));
        p.bias = Tensor::zeros({out});
        if (p.kind == ReparamKind::unstructured) {
            const Tensor all[] = {p.weight};
            p.beta = {initial_beta(*p.kind, all)};
        } else if (p.kind) {
            std::vector<Tensor> rows;
            for (std::size_t i = 0; i < out; ++i) rows.push_back(p.neuron_row(i));
            p.beta.assign(out, initial_beta(*p.kind, rows));
            if (p.kind == ReparamKind::structured_scaled) p.alpha.assign(out, 0.0);
        }
        if (arch_gates && l + 1 < spec.num_layers()) p.gate = ArchParamSet::uniform(out);
        layers.push_back(std::move(p));
    }
    return Mlp(spec, std::move(layers));
}

bool Mlp::has_gates() const {
    for (const auto& p : layers_) {
        if (p.gate) return true;
    }
    return false;
}

namespace {

struct LayerGraph {
    LayerLeaves leaves;
    ad::Var effective;
    std::vector<ad::Var> reg_groups;
    std::optional<ad::Var> gate;
};

LayerGraph bind_layer(ad::Tape& tape, const LayerParams& p, bool coarse, bool regularize_raw) {
    LayerGraph g;
    const std::size_t out = p.fan_out();
    if (p.kind == ReparamKind::unstructured) {
        ad::Var w = tape.leaf(p.weight, p.name + ".weight");
        ad::Var b = tape.leaf(p.bias, p.name + ".bias");
        ad::Var beta = tape.leaf(Tensor::scalar(p.beta.at(0)), p.name + ".beta");
        ad::Var wt = unstructured_reparam(w, beta, coarse);
        g.effective = ad::hcat(wt, ad::reshape(b, {out, 1}));
        g.reg_groups.push_back(regularize_raw ? w : wt);
        g.leaves.weight = w;
        g.leaves.bias = b;
        g.leaves.beta.push_back(beta);
    } else {
        std::vector<ad::Var> eff;
        for (std::size_t i = 0; i < out; ++i) {
            const std::string tag = p.name + ".n" + std::to_string(i);
            ad::Var row = tape.leaf(p.neuron_row(i), tag);
            g.leaves.rows.push_back(row);
            ad::Var e = row;
            if (p.kind) {
                GroupLeaves gl{row, tape.leaf(Tensor::scalar(p.beta.at(i)), tag + ".beta"), std::nullopt};
                g.leaves.beta.push_back(gl.beta);
                if (p.kind == ReparamKind::structured_scaled) {
                    gl.alpha = tape.leaf(Tensor::scalar(p.alpha.at(i)), tag + ".alpha");
                    g.leaves.alpha.push_back(*gl.alpha);
                }
                e = reparameterize(gl, *p.kind, {coarse, kStructuredEps});
            }
            eff.push_back(e);
            g.reg_groups.push_back(regularize_raw ? row : e);
        }
        g.effective = ad::stack_rows(eff);
    }
    if (p.gate) {
        g.leaves.gate_alpha = tape.leaf(p.gate->alpha, p.name + ".gate_alpha");
        g.leaves.gate_beta = tape.leaf(Tensor::scalar(p.gate->beta), p.name + ".gate_beta");
        ad::Var a = arch_weights(*g.leaves.gate_alpha, *g.leaves.gate_beta, coarse);
        g.gate = a;
        g.effective = ad::canonical_zero(ad::transpose(ad::scale_cols(ad::transpose(g.effective), a)));
    }
    return g;
}

Tensor stepped(const Tensor& value, const Tensor& grad, double lr) {
    std::vector<double> v(value.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * grad[i];
    for (double x : v) {
        if (!std::isfinite(x)) throw NonFiniteError("SGD update produced a non-finite parameter");
    }
    return Tensor(value.shape(), std::move(v));
}

double stepped(double value, const Tensor& grad, double lr) {
    const double v = value - lr * grad.item();
    if (!std::isfinite(v)) throw NonFiniteError("SGD update produced a non-finite parameter");
    return v;
}

} // namespace

ForwardPass Mlp::forward(ad::Tape& tape, const Tensor& inputs, bool regularize_raw) const {
    if (inputs.rank() != 2 || inputs.cols() != spec_.layer_sizes.front()) {
        throw ShapeError("model expects inputs with " + std::to_string(spec_.layer_sizes.front()) +
                         " columns, got " + to_string(inputs.shape()));
    }
    ForwardPass pass;
    ad::Var h = tape.constant(inputs);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        LayerGraph g = bind_layer(tape, layers_[l], spec_.coarse_gradient, regularize_raw);
        ad::Var z = ad::matmul(ad::append_ones_col(h), ad::transpose(g.effective));
        const bool last = l + 1 == layers_.size();
        h = last ? z : (spec_.activation == Activation::relu ? ad::relu(z) : ad::tanh(z));
        pass.leaves.push_back(std::move(g.leaves));
        pass.effective.push_back(g.effective);
        pass.reg_groups.insert(pass.reg_groups.end(), g.reg_groups.begin(), g.reg_groups.end());
        if (g.gate) pass.gates.push_back(*g.gate);
    }
    pass.output = h;
    return pass;
}

void Mlp::apply_gradients(const ForwardPass& pass, const ad::Gradients& grads, double lr) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        LayerParams& p = layers_[l];
        const LayerLeaves& lv = pass.leaves.at(l);
        if (lv.weight) {
            p.weight = stepped(p.weight, grads[*lv.weight], lr);
            p.bias = stepped(p.bias, grads[*lv.bias], lr);
        } else {
            const std::size_t in = p.fan_in();
            std::vector<double> w(p.weight.values()), b(p.bias.values());
            for (std::size_t i = 0; i < lv.rows.size(); ++i) {
                const Tensor& g = grads[lv.rows[i]];
                for (std::size_t j = 0; j < in; ++j) w[i * in + j] -= lr * g[j];
                b[i] -= lr * g[in];
            }
            p.weight = Tensor(p.weight.shape(), std::move(w));
            p.bias = Tensor(p.bias.shape(), std::move(b));
        }
        for (std::size_t i = 0; i < lv.beta.size(); ++i) p.beta[i] = stepped(p.beta[i], grads[lv.beta[i]], lr);
        for (std::size_t i = 0; i < lv.alpha.size(); ++i) p.alpha[i] = stepped(p.alpha[i], grads[lv.alpha[i]], lr);
        if (lv.gate_alpha) {
            p.gate->alpha = stepped(p.gate->alpha, grads[*lv.gate_alpha], lr);
            p.gate->beta = stepped(p.gate->beta, grads[*lv.gate_beta], lr);
        }
    }
}

Tensor Mlp::predict(const Tensor& inputs) const {
    ad::Tape tape;
    return forward(tape, inputs).output.value();
}

std::vector<Tensor> Mlp::effective_layers() const {
    ad::Tape tape;
    std::vector<Tensor> out;
    for (const auto& p : layers_) out.push_back(bind_layer(tape, p, false, false).effective.value());
    return out;
}

SparsityReport Mlp::sparsity_of(const std::vector<LayerParams>& layers, const std::vector<Tensor>& effective) {
    if (layers.size() != effective.size()) throw ShapeError("sparsity_of: layer count mismatch");
    std::vector<Tensor> groups;
    std::vector<std::string> names;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Tensor& e = effective[l];
        const std::size_t width = layers[l].kind == ReparamKind::unstructured ? e.cols() - 1 : e.cols();
        for (std::size_t i = 0; i < e.rows(); ++i) {
            auto row = e.data().subspan(i * e.cols(), width);
            groups.push_back(Tensor::vector({row.begin(), row.end()}));
            names.push_back(layers[l].name + ".n" + std::to_string(i));
        }
    }
    return sparsity_report(groups, names);
}

SparsityReport Mlp::sparsity() const { return sparsity_of(layers_, effective_layers()); }

} // namespace dsparse
