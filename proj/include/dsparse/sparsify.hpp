#pragma once

// Differentiable re-parameterizations whose outputs reach exact zeros.
//
// Each function maps raw group weights w and trainable threshold parameters
// to effective weights built from tape primitives, so the thresholds train by
// plain SGD together with the weights:
//
//   structured-exp     w~ = relu(|w|_2 - exp(beta)) / (|w|_2 + eps) * w
//   structured-scaled  w~ = relu(sigmoid(alpha) |w|_2 - sigmoid(beta)) * w
//   unstructured       w~_i = sign(w_i) relu(|w_i| - sigmoid(beta) |w|_1)
//
// With `coarse` set, the thresholding relu uses the elu derivative in the
// backward pass so a clamped group still receives a learning signal.
// All outputs have -0.0 mapped to +0.0.

#include "dsparse/autodiff.hpp"
#include "dsparse/tensor.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsparse {

enum class ReparamKind { structured_exp, structured_scaled, unstructured };

std::string_view to_string(ReparamKind kind);
ReparamKind parse_reparam_kind(std::string_view text);

inline constexpr double kStructuredEps = 1e-12;

struct ParameterGroup {
    std::string name;
    Tensor w;
    double beta = 0.0;
    std::optional<double> alpha; // structured_scaled only
    ReparamKind kind = ReparamKind::structured_exp;

    /// Throws ConfigError when alpha presence disagrees with kind.
    void validate() const;
};

struct ReparamOptions {
    bool coarse = false;
    double eps = kStructuredEps;
};

/// Leaves for one group on a tape.
struct GroupLeaves {
    ad::Var w;
    ad::Var beta;
    std::optional<ad::Var> alpha;
};

GroupLeaves bind_group(ad::Tape& tape, const ParameterGroup& group);

/// relu, or relu forward with elu backward when `coarse` is set.
ad::Var threshold_relu(ad::Var x, bool coarse);

ad::Var structured_reparam(ad::Var w, ad::Var beta, bool coarse, double eps = kStructuredEps);
ad::Var structured_scaled_reparam(ad::Var w, ad::Var alpha, ad::Var beta, bool coarse);
/// Branch-free piecewise form: max(w - t, 0) where w >= 0, min(w + t, 0) elsewhere.
ad::Var unstructured_reparam(ad::Var w, ad::Var beta, bool coarse);
/// sign(w) * relu(|w| - t); kept as an independent route for equivalence checks.
ad::Var unstructured_reparam_sign_form(ad::Var w, ad::Var beta, bool coarse);

ad::Var reparameterize(const GroupLeaves& leaves, ReparamKind kind, const ReparamOptions& options = {});

/// Forward-only evaluation on a scratch tape.
Tensor effective_weights(const ParameterGroup& group, const ReparamOptions& options = {});

/// Threshold parameter that puts the cut-off far below the weight
/// magnitudes of the given groups (nothing clamped at initialization).
double initial_beta(ReparamKind kind, std::span<const Tensor> groups);

/// The threshold in weight units: exp(beta) or sigmoid(beta).
double threshold_scale(ReparamKind kind, double beta);

struct GroupSparsity {
    std::string name;
    std::size_t size = 0;
    std::size_t zeros = 0;
    bool all_zero = false;
};

struct SparsityReport {
    std::vector<GroupSparsity> groups;
    std::size_t total_weights = 0;
    std::size_t zero_weights = 0;
    double zero_fraction = 0.0;
    double zero_group_fraction = 0.0;
};

/// Counts effective weights that are bitwise +-0.0 (never by tolerance).
SparsityReport sparsity_report(std::span<const Tensor> effective, std::span<const std::string> names = {});
SparsityReport sparsity_report(std::span<const ParameterGroup> groups, std::span<const Tensor> effective);

} // namespace dsparse
