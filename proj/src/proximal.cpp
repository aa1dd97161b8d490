#include "dsparse/proximal.hpp"

#include "dsparse/errors.hpp"

#include <cmath>

namespace dsparse {

std::string_view to_string(ProxFrequency f) {
    return f == ProxFrequency::per_minibatch ? "per-minibatch" : "per-epoch";
}

ProxFrequency parse_prox_frequency(std::string_view text) {
    if (text == "per-minibatch") return ProxFrequency::per_minibatch;
    if (text == "per-epoch") return ProxFrequency::per_epoch;
    throw ConfigError("unknown prox frequency '" + std::string(text) + "'", "prox_frequency");
}

void ProxConfig::validate() const {
    if (!(eta > 0.0)) throw ConfigError("proximal step size must be positive", "learning_rate");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative", "lambda");
}

namespace {

void check_step(double eta, double lambda) {
    if (!(eta >= 0.0) || !(lambda >= 0.0)) throw std::invalid_argument("prox: eta and lambda must be non-negative");
}

double canonical(double x) { return x == 0.0 ? 0.0 : x; }

} // namespace

Tensor prox_group(const Tensor& w, double eta, double lambda) {
    check_step(eta, lambda);
    double s = 0.0;
    for (double v : w.data()) s += v * v;
    const double norm = std::sqrt(s);
    if (norm == 0.0) return Tensor::zeros(w.shape());
    const double shrunk = norm - eta * lambda;
    const double factor = (shrunk > 0.0 ? shrunk : 0.0) / norm;
    std::vector<double> out(w.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = canonical(factor * w[i]);
    return Tensor(w.shape(), std::move(out));
}

Tensor prox_exclusive(const Tensor& w, double eta, double lambda) {
    check_step(eta, lambda);
    double l1 = 0.0;
    for (double v : w.data()) l1 += std::fabs(v);
    const double threshold = eta * lambda * l1;
    std::vector<double> out(w.numel());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = w[i];
        const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        const double mag = std::fabs(v) - threshold;
        out[i] = canonical(sign * (mag > 0.0 ? mag : 0.0));
    }
    return Tensor(w.shape(), std::move(out));
}

void apply_prox(Mlp& model, ProxKind kind, double eta, double lambda) {
    for (auto& p : model.layers()) {
        if (p.kind) throw ConfigError("proximal training requires raw (non-reparameterized) layers", "sparsify_kind");
        if (kind == ProxKind::exclusive) {
            p.weight = prox_exclusive(p.weight, eta, lambda);
            continue;
        }
        const std::size_t in = p.fan_in();
        std::vector<double> w(p.weight.values()), b(p.bias.values());
        for (std::size_t i = 0; i < p.fan_out(); ++i) {
            Tensor row = prox_group(p.neuron_row(i), eta, lambda);
            for (std::size_t j = 0; j < in; ++j) w[i * in + j] = row[j];
            b[i] = row[in];
        }
        p.weight = Tensor(p.weight.shape(), std::move(w));
        p.bias = Tensor(p.bias.shape(), std::move(b));
    }
}

double proximal_train_step(Mlp& model, const Dataset& batch, LossKind loss, const ProxConfig& config,
                           bool end_of_epoch) {
    config.validate();
    if (model.spec().any_sparsified() || model.has_gates()) {
        throw ConfigError("proximal training requires raw (non-reparameterized) layers", "sparsify_kind");
    }
    ad::Tape tape;
    ForwardPass pass = model.forward(tape, batch.inputs);
    ad::Var l = prediction_loss(pass.output, batch, loss);
    model.apply_gradients(pass, tape.backward(l), config.eta);
    if (config.frequency == ProxFrequency::per_minibatch || end_of_epoch) {
        apply_prox(model, config.kind, config.eta, config.lambda);
    }
    return l.value().item();
}

} // namespace dsparse
