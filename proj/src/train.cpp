#include "dsparse/train.hpp"

#include "dsparse/arch_params.hpp"
#include "dsparse/errors.hpp"

#include <algorithm>
#include <numeric>

namespace dsparse {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::embedded: return "embedded";
    case Method::proximal: return "proximal";
    case Method::arch_param: return "arch-param";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    if (text == "embedded") return Method::embedded;
    if (text == "proximal") return Method::proximal;
    if (text == "arch-param") return Method::arch_param;
    throw ConfigError("unknown method '" + std::string(text) + "'", "method");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be at least 1", "epochs");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1", "batch_size");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive", "learning_rate");
    regularizer.validate();
    schedule.validate();
}

ProxKind TrainConfig::prox_kind() const {
    return regularizer.kind == RegularizerKind::exclusive_l12 ? ProxKind::exclusive : ProxKind::group;
}

namespace {

ad::Var trainer_regularizer(const ForwardPass& pass, const TrainConfig& config) {
    if (config.method == Method::arch_param) {
        if (pass.gates.empty()) return pass.output.tape->constant(0.0);
        const double p = config.regularizer.p.value_or(kDefaultArchP);
        ad::Var total = arch_pnorm_reg(pass.gates[0], p);
        for (std::size_t i = 1; i < pass.gates.size(); ++i) total = total + arch_pnorm_reg(pass.gates[i], p);
        return total;
    }
    return regularizer(config.regularizer, pass.reg_groups);
}

} // namespace

StepResult sgd_step(Mlp& model, const Dataset& batch, double lambda, const TrainConfig& config, bool end_of_epoch) {
    if (config.method == Method::proximal) {
        ProxConfig prox{config.learning_rate, lambda, config.prox_kind(), config.prox_frequency};
        return {proximal_train_step(model, batch, config.loss, prox, end_of_epoch), 0.0};
    }
    ad::Tape tape;
    ForwardPass pass = model.forward(tape, batch.inputs, config.regularize_raw);
    ad::Var loss = prediction_loss(pass.output, batch, config.loss);
    ad::Var reg = trainer_regularizer(pass, config);
    ad::Var total = objective(loss, reg, lambda);
    model.apply_gradients(pass, tape.backward(total), config.learning_rate);
    return {loss.value().item(), reg.value().item()};
}

double regularizer_value(const Mlp& model, const TrainConfig& config) {
    ad::Tape tape;
    const Tensor probe = Tensor::zeros({1, model.spec().layer_sizes.front()});
    ForwardPass pass = model.forward(tape, probe, config.regularize_raw);
    return trainer_regularizer(pass, config).value().item();
}

EvalResult evaluate(const Mlp& model, const Dataset& data, LossKind loss) {
    ad::Tape tape;
    ForwardPass pass = model.forward(tape, data.inputs);
    EvalResult result{prediction_loss(pass.output, data, loss).value().item(), std::nullopt};
    if (data.task == Task::classification) {
        const Tensor& out = pass.output.value();
        const auto labels = data.labels();
        std::size_t correct = 0;
        for (std::size_t r = 0; r < out.rows(); ++r) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < out.cols(); ++c) {
                if (out.at(r, c) > out.at(r, best)) best = c;
            }
            correct += best == labels[r] ? 1 : 0;
        }
        result.accuracy = static_cast<double>(correct) / static_cast<double>(out.rows());
    }
    return result;
}

void check_compatible(const ModelSpec& spec, const Split& data, LossKind loss) {
    spec.validate();
    for (const Dataset* d : {&data.train, &data.validation}) {
        d->validate();
        if (d->features() != spec.layer_sizes.front()) {
            throw ConfigError("dataset has " + std::to_string(d->features()) + " features but layer_sizes starts with " +
                                  std::to_string(spec.layer_sizes.front()),
                              "layer_sizes");
        }
        if (loss == LossKind::mse) {
            if (d->task != Task::regression) throw ConfigError("mse loss requires a regression dataset", "loss");
            if (d->outputs() != spec.layer_sizes.back()) {
                throw ConfigError("dataset has " + std::to_string(d->outputs()) + " targets but the output layer has " +
                                      std::to_string(spec.layer_sizes.back()) + " units",
                                  "layer_sizes");
            }
        } else {
            if (d->task != Task::classification) {
                throw ConfigError("cross-entropy loss requires a classification dataset", "loss");
            }
            if (spec.layer_sizes.back() < std::max<std::size_t>(2, d->num_classes())) {
                throw ConfigError("output layer is narrower than the number of classes", "layer_sizes");
            }
        }
    }
}

namespace {

void check_method(const ModelSpec& spec, Method method, bool gated) {
    if (method != Method::embedded && spec.any_sparsified()) {
        throw ConfigError(std::string(to_string(method)) + " training requires sparsify_kind none", "sparsify_kind");
    }
    if (gated != (method == Method::arch_param)) {
        throw ConfigError("architecture gates are used exactly by the arch-param method", "method");
    }
}

} // namespace

Trainer::Trainer(const ModelSpec& spec, Split data, TrainConfig config)
    : data_(std::move(data)), config_(std::move(config)), rng_(config_.seed) {
    config_.validate();
    check_compatible(spec, data_, config_.loss);
    model_ = Mlp::initialize(spec, rng_, config_.method == Method::arch_param);
    check_method(spec, config_.method, model_.has_gates());
}

Trainer::Trainer(Mlp model, Split data, TrainConfig config, Rng rng, long epoch)
    : model_(std::move(model)), data_(std::move(data)), config_(std::move(config)), rng_(std::move(rng)), epoch_(epoch) {
    config_.validate();
    check_compatible(model_.spec(), data_, config_.loss);
    check_method(model_.spec(), config_.method, model_.has_gates());
}

EpochMetrics Trainer::run_epoch() { return run_epoch(lambda_at(config_.schedule, epoch_ + 1)); }

EpochMetrics Trainer::run_epoch(double lambda) {
    const long t = epoch_ + 1;
    std::vector<std::size_t> order(data_.train.rows());
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(order);
    const std::size_t bs = config_.batch_size;
    const std::size_t batches = (order.size() + bs - 1) / bs;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t first = b * bs;
        const std::size_t count = std::min(bs, order.size() - first);
        const Dataset batch = data_.train.subset(std::span<const std::size_t>(order).subspan(first, count));
        try {
            sgd_step(model_, batch, lambda, config_, b + 1 == batches);
        } catch (const NonFiniteError& e) {
            throw std::runtime_error("non-finite value at epoch " + std::to_string(t) + ", batch " + std::to_string(b) +
                                     ": " + e.what());
        }
    }
    epoch_ = t;
    return measure(lambda);
}

EpochMetrics Trainer::measure(double lambda) const {
    EpochMetrics m;
    m.epoch = epoch_;
    m.lambda = lambda;
    m.train_loss = evaluate(model_, data_.train, config_.loss).loss;
    const EvalResult val = evaluate(model_, data_.validation, config_.loss);
    m.val_loss = val.loss;
    m.val_accuracy = val.accuracy;
    m.reg_value = regularizer_value(model_, config_);
    m.sparsity = model_.sparsity();
    return m;
}

TrainResult train_loop(const ModelSpec& spec, const Split& data, const TrainConfig& config) {
    Trainer trainer(spec, data, config);
    TrainResult result;
    result.initial = trainer.measure(lambda_at(config.schedule, 0));
    for (std::size_t e = 0; e < config.epochs; ++e) result.history.push_back(trainer.run_epoch());
    result.model = trainer.model();
    result.rng_state = trainer.rng().state();
    result.epoch = trainer.epoch();
    return result;
}

} // namespace dsparse
