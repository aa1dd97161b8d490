#pragma once

#include "dsparse/autodiff.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace dsparse {

enum class RegularizerKind { group_l21, exclusive_l12, group_pnorm, l2 };

std::string_view to_string(RegularizerKind kind);
RegularizerKind parse_regularizer_kind(std::string_view text);

/// Smoothing offset for |w|^p: (|w| + eps)^p - eps^p.
inline constexpr double kPnormEps = 1e-8;

struct RegularizerSpec {
    RegularizerKind kind = RegularizerKind::group_l21;
    std::optional<double> p; // group_pnorm only, 0 < p <= 1

    void validate() const;
};

/// sum_g |w_g|_2
ad::Var group_l21(std::span<const ad::Var> groups);
/// 1/2 sum_g |w_g|_1^2
ad::Var exclusive_l12(std::span<const ad::Var> groups);
/// sum_g (sum_i |w_gi|^p)^(1/p), with smoothed |w|^p.
ad::Var group_pnorm(std::span<const ad::Var> groups, double p);
/// sum_g |w_g|_2^2
ad::Var l2_penalty(std::span<const ad::Var> groups);

/// (sum_i |x_i|^p)^(1/p) of a single tensor, with the same smoothing.
ad::Var smoothed_pnorm(ad::Var x, double p);

ad::Var regularizer(const RegularizerSpec& spec, std::span<const ad::Var> groups);

/// loss + lambda * reg; lambda must be non-negative. lambda == 0 returns
/// `loss` itself.
ad::Var objective(ad::Var loss, ad::Var reg, double lambda);

} // namespace dsparse
