#include "dsparse/sparsify.hpp"

#include "dsparse/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dsparse {

std::string_view to_string(ReparamKind kind) {
    switch (kind) {
    case ReparamKind::structured_exp: return "structured-exp";
    case ReparamKind::structured_scaled: return "structured-scaled";
    case ReparamKind::unstructured: return "unstructured";
    }
    return "unknown";
}

ReparamKind parse_reparam_kind(std::string_view text) {
    if (text == "structured-exp") return ReparamKind::structured_exp;
    if (text == "structured-scaled") return ReparamKind::structured_scaled;
    if (text == "unstructured") return ReparamKind::unstructured;
    throw ConfigError("unknown sparsify kind '" + std::string(text) + "'", "sparsify_kind");
}

void ParameterGroup::validate() const {
    if (alpha.has_value() != (kind == ReparamKind::structured_scaled)) {
        throw ConfigError("group '" + name + "': alpha must be present exactly for structured-scaled groups");
    }
}

GroupLeaves bind_group(ad::Tape& tape, const ParameterGroup& group) {
    group.validate();
    GroupLeaves leaves{tape.leaf(group.w, group.name + ".w"), tape.leaf(Tensor::scalar(group.beta), group.name + ".beta"),
                       std::nullopt};
    if (group.alpha) leaves.alpha = tape.leaf(Tensor::scalar(*group.alpha), group.name + ".alpha");
    return leaves;
}

ad::Var threshold_relu(ad::Var x, bool coarse) {
    return coarse ? ad::custom_grad(x, ad::relu_fn(), ad::elu_fn()) : ad::relu(x);
}

ad::Var structured_reparam(ad::Var w, ad::Var beta, bool coarse, double eps) {
    ad::Var norm = ad::norm2(w);
    ad::Var factor = threshold_relu(norm - ad::exp(beta), coarse) / (norm + eps);
    return ad::canonical_zero(factor * w);
}

ad::Var structured_scaled_reparam(ad::Var w, ad::Var alpha, ad::Var beta, bool coarse) {
    ad::Var factor = threshold_relu(ad::sigmoid(alpha) * ad::norm2(w) - ad::sigmoid(beta), coarse);
    return ad::canonical_zero(factor * w);
}

namespace {

ad::Var unstructured_threshold(ad::Var w, ad::Var beta) { return ad::sigmoid(beta) * ad::sum(ad::abs(w)); }

} // namespace

ad::Var unstructured_reparam(ad::Var w, ad::Var beta, bool coarse) {
    ad::Tape& tape = *w.tape;
    const Tensor& wv = w.value();
    std::vector<double> pos(wv.numel()), negm(wv.numel());
    for (std::size_t i = 0; i < wv.numel(); ++i) {
        pos[i] = wv[i] < 0.0 ? 0.0 : 1.0;
        negm[i] = 1.0 - pos[i];
    }
    ad::Var t = unstructured_threshold(w, beta);
    ad::Var upper = threshold_relu(w - t, coarse);
    ad::Var lower = threshold_relu(-w - t, coarse); // min(w + t, 0) == -relu(-w - t)
    ad::Var out = tape.constant(Tensor(wv.shape(), std::move(pos))) * upper -
                  tape.constant(Tensor(wv.shape(), std::move(negm))) * lower;
    return ad::canonical_zero(out);
}

ad::Var unstructured_reparam_sign_form(ad::Var w, ad::Var beta, bool coarse) {
    ad::Var t = unstructured_threshold(w, beta);
    return ad::canonical_zero(ad::sign(w) * threshold_relu(ad::abs(w) - t, coarse));
}

ad::Var reparameterize(const GroupLeaves& leaves, ReparamKind kind, const ReparamOptions& options) {
    switch (kind) {
    case ReparamKind::structured_exp: return structured_reparam(leaves.w, leaves.beta, options.coarse, options.eps);
    case ReparamKind::structured_scaled:
        if (!leaves.alpha) throw ConfigError("structured-scaled re-parameterization requires alpha");
        return structured_scaled_reparam(leaves.w, *leaves.alpha, leaves.beta, options.coarse);
    case ReparamKind::unstructured: return unstructured_reparam(leaves.w, leaves.beta, options.coarse);
    }
    throw std::logic_error("unhandled re-parameterization kind");
}

Tensor effective_weights(const ParameterGroup& group, const ReparamOptions& options) {
    ad::Tape tape;
    return reparameterize(bind_group(tape, group), group.kind, options).value();
}

double initial_beta(ReparamKind kind, std::span<const Tensor> groups) {
    switch (kind) {
    case ReparamKind::structured_exp: {
        double total = 0.0;
        for (const auto& g : groups) {
            double s = 0.0;
            for (double v : g.data()) s += v * v;
            total += std::sqrt(s);
        }
        const double mean = groups.empty() ? 0.0 : total / static_cast<double>(groups.size());
        return mean > 0.0 ? std::log(0.01 * mean) : std::log(kStructuredEps);
    }
    case ReparamKind::structured_scaled: return -5.0;
    case ReparamKind::unstructured: {
        // sigmoid(beta) * |w|_1 == 1% of the mean |w_i| over the group.
        std::size_t n = 0;
        for (const auto& g : groups) n = std::max(n, g.numel());
        const double q = 0.01 / static_cast<double>(std::max<std::size_t>(n, 1));
        return std::log(q / (1.0 - q));
    }
    }
    throw std::logic_error("unhandled re-parameterization kind");
}

double threshold_scale(ReparamKind kind, double beta) {
    if (kind == ReparamKind::structured_exp) return std::exp(beta);
    return beta >= 0.0 ? 1.0 / (1.0 + std::exp(-beta)) : std::exp(beta) / (1.0 + std::exp(beta));
}

SparsityReport sparsity_report(std::span<const Tensor> effective, std::span<const std::string> names) {
    if (!names.empty() && names.size() != effective.size()) {
        throw std::invalid_argument("sparsity_report: " + std::to_string(names.size()) + " names for " +
                                    std::to_string(effective.size()) + " groups");
    }
    SparsityReport report;
    std::size_t zero_groups = 0;
    for (std::size_t g = 0; g < effective.size(); ++g) {
        GroupSparsity s;
        s.name = names.empty() ? "g" + std::to_string(g) : names[g];
        s.size = effective[g].numel();
        for (double v : effective[g].data()) s.zeros += is_bitwise_zero(v) ? 1 : 0;
        s.all_zero = s.zeros == s.size;
        zero_groups += s.all_zero ? 1 : 0;
        report.total_weights += s.size;
        report.zero_weights += s.zeros;
        report.groups.push_back(std::move(s));
    }
    if (report.total_weights > 0) {
        report.zero_fraction = static_cast<double>(report.zero_weights) / static_cast<double>(report.total_weights);
    }
    if (!effective.empty()) {
        report.zero_group_fraction = static_cast<double>(zero_groups) / static_cast<double>(effective.size());
    }
    return report;
}

SparsityReport sparsity_report(std::span<const ParameterGroup> groups, std::span<const Tensor> effective) {
    if (groups.size() != effective.size()) {
        throw std::invalid_argument("sparsity_report: " + std::to_string(groups.size()) + " groups but " +
                                    std::to_string(effective.size()) + " effective tensors");
    }
    std::vector<std::string> names;
    for (const auto& g : groups) names.push_back(g.name);
    return sparsity_report(effective, names);
}

} // namespace dsparse
