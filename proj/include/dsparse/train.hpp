#pragma once

#include "dsparse/data.hpp"
#include "dsparse/model.hpp"
#include "dsparse/proximal.hpp"
#include "dsparse/regularize.hpp"
#include "dsparse/rng.hpp"
#include "dsparse/schedule.hpp"
#include "dsparse/sparsify.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace dsparse {

enum class Method { embedded, proximal, arch_param };
std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// p used for the architecture-weight penalty when the regularizer has none.
inline constexpr double kDefaultArchP = 0.5;

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 32;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    RegularizerSpec regularizer;
    LambdaSchedule schedule;
    Method method = Method::embedded;
    LossKind loss = LossKind::mse;
    bool regularize_raw = false;
    ProxFrequency prox_frequency = ProxFrequency::per_minibatch;

    void validate() const;
    /// Shrinkage used by the proximal method for this regularizer.
    ProxKind prox_kind() const;
};

struct EpochMetrics {
    long epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lambda = 0.0;
    double reg_value = 0.0;
    std::optional<double> val_accuracy;
    SparsityReport sparsity;
};

struct StepResult {
    double loss = 0.0;
    double reg = 0.0;
};

/// One plain-SGD step on loss + lambda * R, updating weights, thresholds,
/// scales and gates together. For the proximal method the regularizer is
/// replaced by the prox step.
StepResult sgd_step(Mlp& model, const Dataset& batch, double lambda, const TrainConfig& config,
                    bool end_of_epoch = false);

/// Regularizer value of the model as the trainer sees it.
double regularizer_value(const Mlp& model, const TrainConfig& config);

struct EvalResult {
    double loss = 0.0;
    std::optional<double> accuracy;
};

EvalResult evaluate(const Mlp& model, const Dataset& data, LossKind loss);

/// Checks that the data fits the model and loss before any training.
void check_compatible(const ModelSpec& spec, const Split& data, LossKind loss);

/// Epoch-by-epoch driver. Epochs are numbered from 1; epoch t trains with
/// lambda_at(schedule, t) held constant.
class Trainer {
public:
    /// Fresh model initialized from an Rng seeded with config.seed.
    Trainer(const ModelSpec& spec, Split data, TrainConfig config);
    /// Resume from an existing model and generator state.
    Trainer(Mlp model, Split data, TrainConfig config, Rng rng, long epoch);

    EpochMetrics run_epoch();
    /// Trains the next epoch with an explicit lambda instead of the schedule.
    EpochMetrics run_epoch(double lambda);
    /// Metrics of the current model, labelled with the current epoch.
    EpochMetrics measure(double lambda) const;

    const Mlp& model() const { return model_; }
    Mlp& model() { return model_; }
    const TrainConfig& config() const { return config_; }
    const Split& data() const { return data_; }
    const Rng& rng() const { return rng_; }
    long epoch() const { return epoch_; }

private:
    Mlp model_;
    Split data_;
    TrainConfig config_;
    Rng rng_;
    long epoch_ = 0;
};

struct TrainResult {
    Mlp model;
    EpochMetrics initial;
    std::vector<EpochMetrics> history;
    std::string rng_state;
    long epoch = 0;
};

TrainResult train_loop(const ModelSpec& spec, const Split& data, const TrainConfig& config);

} // namespace dsparse
