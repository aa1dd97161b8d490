#include "dsparse/regularize.hpp"

#include "dsparse/errors.hpp"

#include <cmath>
#include <string>

namespace dsparse {

std::string_view to_string(RegularizerKind kind) {
    switch (kind) {
    case RegularizerKind::group_l21: return "group-l21";
    case RegularizerKind::exclusive_l12: return "exclusive-l12";
    case RegularizerKind::group_pnorm: return "group-pnorm";
    case RegularizerKind::l2: return "l2";
    }
    return "unknown";
}

RegularizerKind parse_regularizer_kind(std::string_view text) {
    if (text == "group-l21") return RegularizerKind::group_l21;
    if (text == "exclusive-l12") return RegularizerKind::exclusive_l12;
    if (text == "group-pnorm") return RegularizerKind::group_pnorm;
    if (text == "l2") return RegularizerKind::l2;
    throw ConfigError("unknown regularizer '" + std::string(text) + "'", "regularizer");
}

namespace {

void check_p(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p must lie in (0, 1], got " + std::to_string(p), "p");
}

void check_groups(std::span<const ad::Var> groups, const char* who) {
    if (groups.empty()) throw std::invalid_argument(std::string(who) + ": no groups given");
}

template <class PerGroup>
ad::Var sum_over(std::span<const ad::Var> groups, PerGroup f) {
    ad::Var total = f(groups[0]);
    for (std::size_t g = 1; g < groups.size(); ++g) total = total + f(groups[g]);
    return total;
}

} // namespace

void RegularizerSpec::validate() const {
    if (kind == RegularizerKind::group_pnorm) {
        if (!p) throw ConfigError("group-pnorm requires p", "p");
        check_p(*p);
    } else if (p) {
        throw ConfigError("p is only meaningful for group-pnorm", "p");
    }
}

ad::Var group_l21(std::span<const ad::Var> groups) {
    check_groups(groups, "group_l21");
    return sum_over(groups, [](ad::Var w) { return ad::norm2(w); });
}

ad::Var exclusive_l12(std::span<const ad::Var> groups) {
    check_groups(groups, "exclusive_l12");
    return 0.5 * sum_over(groups, [](ad::Var w) { return ad::square(ad::sum(ad::abs(w))); });
}

ad::Var smoothed_pnorm(ad::Var x, double p) {
    check_p(p);
    ad::Var powered = ad::pow(ad::abs(x) + kPnormEps, p) - std::pow(kPnormEps, p);
    return ad::pow(ad::sum(powered), 1.0 / p);
}

ad::Var group_pnorm(std::span<const ad::Var> groups, double p) {
    check_p(p);
    check_groups(groups, "group_pnorm");
    return sum_over(groups, [p](ad::Var w) { return smoothed_pnorm(w, p); });
}

ad::Var l2_penalty(std::span<const ad::Var> groups) {
    check_groups(groups, "l2_penalty");
    return sum_over(groups, [](ad::Var w) { return ad::sum_squares(w); });
}

ad::Var regularizer(const RegularizerSpec& spec, std::span<const ad::Var> groups) {
    spec.validate();
    switch (spec.kind) {
    case RegularizerKind::group_l21: return group_l21(groups);
    case RegularizerKind::exclusive_l12: return exclusive_l12(groups);
    case RegularizerKind::group_pnorm: return group_pnorm(groups, *spec.p);
    case RegularizerKind::l2: return l2_penalty(groups);
    }
    throw std::logic_error("unhandled regularizer kind");
}

ad::Var objective(ad::Var loss, ad::Var reg, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("objective: lambda must be non-negative");
    if (lambda == 0.0) return loss;
    return loss + lambda * reg;
}

} // namespace dsparse
