#include "dsparse/errors.hpp"
#include "dsparse/rng.hpp"
#include "dsparse/sparsify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dsparse;
using namespace dsparse::ad;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

Tensor structured(const Tensor& w, double beta, double eps = kStructuredEps, bool coarse = false) {
    Tape t;
    return structured_reparam(t.leaf(w), t.leaf(Tensor::scalar(beta)), coarse, eps).value();
}

Tensor scaled(const Tensor& w, double alpha, double beta) {
    Tape t;
    return structured_scaled_reparam(t.leaf(w), t.leaf(Tensor::scalar(alpha)), t.leaf(Tensor::scalar(beta)), false)
        .value();
}

Tensor unstructured(const Tensor& w, double beta) {
    Tape t;
    return unstructured_reparam(t.leaf(w), t.leaf(Tensor::scalar(beta)), false).value();
}

Tensor random_vector(Rng& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return Tensor::vector(v);
}

} // namespace

TEST(StructuredExp, HandEvaluatedExamples) {
    const Tensor w = Tensor::vector({3, 4});
    const Tensor a = structured(w, std::log(2.0), 0.0);
    EXPECT_NEAR(a[0], 1.8, 1e-15);
    EXPECT_NEAR(a[1], 2.4, 1e-15);
    const Tensor z = structured(w, std::log(6.0));
    EXPECT_TRUE(bitwise_equal(z, Tensor::vector({0.0, 0.0})));
    const Tensor zz = structured(Tensor::vector({0, 0}), 1.3);
    EXPECT_TRUE(bitwise_equal(zz, Tensor::vector({0.0, 0.0})));
}

TEST(StructuredScaled, HandEvaluatedExamples) {
    const Tensor w = Tensor::vector({3, 4});
    const Tensor a = scaled(w, 0.0, 0.0);
    EXPECT_NEAR(a[0], 6.0, 1e-14);
    EXPECT_NEAR(a[1], 8.0, 1e-14);
    EXPECT_TRUE(bitwise_equal(scaled(w, logit(0.1), logit(0.9)), Tensor::vector({0.0, 0.0})));
    EXPECT_TRUE(bitwise_equal(scaled(Tensor::vector({0, 0}), 2.0, -3.0), Tensor::vector({0.0, 0.0})));
}

TEST(StructuredScaled, AlphaRequiredByKind) {
    ParameterGroup g{"g", Tensor::vector({1, 2}), 0.0, std::nullopt, ReparamKind::structured_scaled};
    EXPECT_THROW(g.validate(), ConfigError);
    g.alpha = 0.0;
    EXPECT_NO_THROW(g.validate());
    g.kind = ReparamKind::structured_exp;
    EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Unstructured, HandEvaluatedExamples) {
    const Tensor w = Tensor::vector({0.5, -0.15, 0.1});
    const Tensor a = unstructured(w, logit(0.25));
    EXPECT_NEAR(a[0], 0.3125, 1e-15);
    EXPECT_TRUE(is_bitwise_zero(a[1]) && !std::signbit(a[1]));
    EXPECT_TRUE(is_bitwise_zero(a[2]) && !std::signbit(a[2]));

    const Tensor id = unstructured(w, -40.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(id[i], w[i], 1e-12);

    const Tensor z = unstructured(Tensor::vector({0.0, 1.0, -2.0}), 3.0);
    EXPECT_EQ(z[0], 0.0);
}

TEST(Unstructured, PiecewiseEqualsSignFormBitwise) {
    Rng rng(21);
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> v(1 + rng.index(8));
        for (auto& x : v) x = rng.uniform(0, 1) < 0.15 ? 0.0 : rng.uniform(-2, 2);
        const double beta = rng.uniform(-6, 1);
        Tape t;
        Var w = t.leaf(Tensor::vector(v));
        Var b = t.leaf(Tensor::scalar(beta));
        const Tensor a = unstructured_reparam(w, b, false).value();
        const Tensor s = unstructured_reparam_sign_form(w, b, false).value();
        ASSERT_TRUE(bitwise_equal(a, s)) << "instance " << i;
    }
}

TEST(Reparam, ExactZeroAndShrinkageProperties) {
    Rng rng(22);
    for (int i = 0; i < 2000; ++i) {
        const Tensor w = random_vector(rng, 1 + rng.index(8), 2.0);
        double n2 = 0.0, n1 = 0.0;
        for (double x : w.data()) {
            n2 += x * x;
            n1 += std::fabs(x);
        }
        n2 = std::sqrt(n2);
        const double beta = std::log(n2) + rng.uniform(-1.0, 1.0);
        const Tensor s = structured(w, beta);
        const double sb = rng.uniform(-4.0, 0.0);
        const Tensor u = unstructured(w, sb);
        const Tensor c = scaled(w, rng.uniform(-2, 2), rng.uniform(-2, 2));
        for (std::size_t j = 0; j < w.numel(); ++j) {
            if (n2 <= std::exp(beta)) EXPECT_TRUE(is_bitwise_zero(s[j]));
            if (std::fabs(w[j]) <= 1.0 / (1.0 + std::exp(-sb)) * n1) EXPECT_TRUE(is_bitwise_zero(u[j]));
            EXPECT_LE(std::fabs(s[j]), std::fabs(w[j]));
            EXPECT_LE(std::fabs(u[j]), std::fabs(w[j]));
            for (double e : {s[j], u[j], c[j]}) {
                EXPECT_TRUE(e == 0.0 || std::signbit(e) == std::signbit(w[j]));
            }
        }
    }
}

TEST(Reparam, CoarseGradientReachesClampedThreshold) {
    const Tensor w = Tensor::vector({0.3, -0.4}); // norm 0.5
    const double beta = std::log(0.8);
    for (bool coarse : {false, true}) {
        Tape t;
        Var wl = t.leaf(w);
        Var bl = t.leaf(Tensor::scalar(beta));
        Var out = structured_reparam(wl, bl, coarse);
        Var loss = sum(out * t.constant(Tensor::vector({1.0, 2.0})));
        const Gradients g = t.backward(loss);
        // d/dbeta = -exp(beta) * elu'(0.5 - 0.8) / (0.5 + eps) * (c . w)
        const double expected = coarse ? -0.8 * std::exp(-0.3) / (0.5 + kStructuredEps) * (0.3 - 0.8) : 0.0;
        if (coarse) {
            EXPECT_NEAR(g[bl].item(), expected, 1e-12);
            EXPECT_NE(g[bl].item(), 0.0);
        } else {
            EXPECT_EQ(g[bl].item(), 0.0);
        }
        EXPECT_TRUE(bitwise_equal(out.value(), Tensor::vector({0.0, 0.0})));
    }
}

TEST(SparsityReport, CountsBitwiseZeros) {
    const std::vector<Tensor> eff = {Tensor::vector({0.0, 0.0}), Tensor::vector({1.0, 0.0})};
    const SparsityReport r = sparsity_report(eff);
    EXPECT_DOUBLE_EQ(r.zero_fraction, 0.75);
    ASSERT_EQ(r.groups.size(), 2u);
    EXPECT_TRUE(r.groups[0].all_zero);
    EXPECT_FALSE(r.groups[1].all_zero);
    EXPECT_DOUBLE_EQ(r.zero_group_fraction, 0.5);

    const std::vector<Tensor> dense = {Tensor::vector({1e-300, -1e-300})};
    EXPECT_EQ(sparsity_report(dense).zero_fraction, 0.0);

    const std::vector<Tensor> neg = {Tensor::vector({-0.0})};
    EXPECT_EQ(sparsity_report(neg).zero_fraction, 1.0);
}

TEST(SparsityReport, ClampedStructuredGroupFlagged) {
    const Tensor w = Tensor::vector({3, 4});
    std::vector<ParameterGroup> groups = {{"a", w, std::log(6.0), std::nullopt, ReparamKind::structured_exp},
                                          {"b", w, std::log(2.0), std::nullopt, ReparamKind::structured_exp}};
    std::vector<Tensor> eff;
    for (const auto& g : groups) eff.push_back(effective_weights(g));
    const SparsityReport r = sparsity_report(groups, eff);
    EXPECT_TRUE(r.groups[0].all_zero);
    EXPECT_FALSE(r.groups[1].all_zero);
    EXPECT_EQ(r.groups[0].name, "a");
    eff.pop_back();
    EXPECT_THROW(sparsity_report(groups, eff), std::invalid_argument);
}

TEST(InitialBeta, NothingClampedAtInitialization) {
    Rng rng(5);
    std::vector<Tensor> groups;
    for (int i = 0; i < 16; ++i) groups.push_back(random_vector(rng, 21, 0.2));
    for (auto kind : {ReparamKind::structured_exp, ReparamKind::structured_scaled}) {
        const double beta = initial_beta(kind, groups);
        for (const auto& g : groups) {
            ParameterGroup pg{"g", g, beta, std::nullopt, kind};
            if (kind == ReparamKind::structured_scaled) pg.alpha = 0.0;
            const SparsityReport r = sparsity_report(std::vector<Tensor>{effective_weights(pg)});
            EXPECT_EQ(r.zero_fraction, 0.0);
        }
    }
    EXPECT_NEAR(std::exp(initial_beta(ReparamKind::structured_exp, groups)),
                0.01 * [&] {
                    double s = 0.0;
                    for (const auto& g : groups) {
                        double n = 0.0;
                        for (double x : g.data()) n += x * x;
                        s += std::sqrt(n);
                    }
                    return s / 16.0;
                }(),
                1e-15);
    EXPECT_EQ(initial_beta(ReparamKind::structured_scaled, groups), -5.0);
}

TEST(ReparamKindNames, RoundTrip) {
    for (auto k : {ReparamKind::structured_exp, ReparamKind::structured_scaled, ReparamKind::unstructured}) {
        EXPECT_EQ(parse_reparam_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_reparam_kind("dense"), ConfigError);
}
