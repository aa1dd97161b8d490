#pragma once

// Proximal-gradient baseline: SGD on the prediction loss alone, followed by
// a closed-form shrinkage step.
//
//   group      w_g <- relu(|w_g|_2 - eta*lambda) / |w_g|_2 * w_g
//   exclusive  w_gi <- sign(w_gi) relu(|w_gi| - eta*lambda |w_g|_1)

#include "dsparse/data.hpp"
#include "dsparse/model.hpp"
#include "dsparse/tensor.hpp"

#include <string_view>

namespace dsparse {

enum class ProxKind { group, exclusive };
enum class ProxFrequency { per_minibatch, per_epoch };

std::string_view to_string(ProxFrequency f);
ProxFrequency parse_prox_frequency(std::string_view text);

struct ProxConfig {
    double eta = 0.1;
    double lambda = 0.0;
    ProxKind kind = ProxKind::group;
    ProxFrequency frequency = ProxFrequency::per_minibatch;

    void validate() const;
};

/// Group soft-thresholding; an all-zero group stays all-zero.
Tensor prox_group(const Tensor& w, double eta, double lambda);
/// Per-coordinate soft-thresholding by eta*lambda*|w|_1 of the input vector.
Tensor prox_exclusive(const Tensor& w, double eta, double lambda);

/// Applies the prox operator to every group of `model`: neuron rows (with
/// bias) for the group kind, whole weight matrices for the exclusive kind.
void apply_prox(Mlp& model, ProxKind kind, double eta, double lambda);

/// One SGD step on the prediction loss; the prox step follows for
/// per-minibatch frequency, or when `end_of_epoch` is set for per-epoch.
/// Returns the prediction loss before the update.
double proximal_train_step(Mlp& model, const Dataset& batch, LossKind loss, const ProxConfig& config,
                           bool end_of_epoch);

} // namespace dsparse
