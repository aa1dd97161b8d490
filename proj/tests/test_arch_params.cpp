#include "dsparse/arch_params.hpp"
#include "dsparse/errors.hpp"
#include "dsparse/regularize.hpp"
#include "dsparse/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dsparse;
using namespace dsparse::ad;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

Tensor weights(std::vector<double> alpha, double sigma_beta) {
    return arch_weights(ArchParamSet{Tensor::vector(std::move(alpha)), logit(sigma_beta)});
}

double pnorm(std::vector<double> a, double p) {
    Tape t;
    return arch_pnorm_reg(t.leaf(Tensor::vector(std::move(a))), p).value().item();
}

} // namespace

TEST(ArchWeights, Examples) {
    const Tensor a = weights({0, 0, 0}, 0.2);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], 1.0 / 3.0, 1e-15);
    EXPECT_TRUE(bitwise_equal(weights({0, 0, 0}, 0.4), Tensor::vector({0.0, 0.0, 0.0})));
    EXPECT_EQ(weights({0.7}, 0.3)[0], 1.0);
}

TEST(ArchWeights, Properties) {
    Rng rng(51);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> alpha(1 + rng.index(8));
        for (auto& x : alpha) x = rng.uniform(-2, 2);
        const double sb = rng.uniform(0.01, 0.5);
        const Tensor a = weights(alpha, sb);
        double sum = 0.0, g1 = 0.0;
        std::size_t positive = 0;
        for (double x : alpha) g1 += std::exp(x);
        for (std::size_t j = 0; j < a.numel(); ++j) {
            EXPECT_GE(a[j], 0.0);
            sum += a[j];
            positive += a[j] > 0.0;
            if (std::exp(alpha[j]) <= sb * g1) EXPECT_TRUE(is_bitwise_zero(a[j]));
        }
        if (positive > 0) EXPECT_NEAR(sum, 1.0, 1e-12);
        if (positive == 1) {
            for (std::size_t j = 0; j < a.numel(); ++j) EXPECT_TRUE(a[j] == 0.0 || a[j] == 1.0);
        }

        const double c = rng.uniform(-3, 3);
        std::vector<double> shifted = alpha;
        for (auto& x : shifted) x += c;
        const Tensor b = weights(shifted, sb);
        for (std::size_t j = 0; j < a.numel(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
    }
}

TEST(ArchPnorm, Examples) {
    const double e = kPnormEps;
    EXPECT_NEAR(pnorm({1, 0, 0}, 0.5), std::pow(std::sqrt(1 + e) - std::sqrt(e), 2.0), 1e-12);
    EXPECT_NEAR(pnorm({1, 0, 0}, 0.5), 1.0, 1e-3);
    EXPECT_NEAR(pnorm({0.5, 0.5}, 1.0), 1.0, 1e-7);
    EXPECT_NEAR(pnorm({0.5, 0.5}, 0.5), std::pow(2 * (std::sqrt(0.5 + e) - std::sqrt(e)), 2.0), 1e-12);
    EXPECT_NEAR(pnorm({0.5, 0.5}, 0.5), 2.0, 1e-3);
    EXPECT_THROW(pnorm({0.5}, 0.0), ConfigError);
    EXPECT_THROW(pnorm({0.5}, 2.0), ConfigError);
}

TEST(ModularForward, Examples) {
    const std::vector<Component> sel = {[](Var x) { return x; }, [](Var x) { return neg(x); }};
    Tape t;
    Var x = t.leaf(Tensor::vector({2.0}));
    EXPECT_EQ(modular_forward(x, t.constant(Tensor::vector({1, 0})), sel).value(), Tensor::vector({2.0}));

    const std::vector<Component> same = {[](Var v) { return v; }, [](Var v) { return v; }};
    Var y = t.leaf(Tensor::vector({1.5, -3.0}));
    EXPECT_EQ(modular_forward(y, t.constant(Tensor::vector({0.5, 0.5})), same).value(), y.value());
    EXPECT_TRUE(bitwise_equal(modular_forward(y, t.constant(Tensor::vector({0, 0})), same).value(),
                              Tensor::vector({0.0, 0.0})));

    const std::vector<Component> mismatched = {[](Var v) { return v; }, [](Var v) { return sum(v); }};
    EXPECT_THROW(modular_forward(y, t.constant(Tensor::vector({0.5, 0.5})), mismatched), ShapeError);
    EXPECT_THROW(modular_forward(y, t.constant(Tensor::vector({1.0})), same), ShapeError);
}

TEST(ArchWeights, CoarseHookKeepsGradientOnClampedSet) {
    for (bool coarse : {false, true}) {
        Tape t;
        Var alpha = t.leaf(Tensor::vector({0.0, 0.0, 0.0}));
        Var beta = t.leaf(Tensor::scalar(logit(0.4)));
        Var a = arch_weights(alpha, beta, coarse);
        const Gradients g = t.backward(sum(a * t.constant(Tensor::vector({1, 2, 3}))));
        EXPECT_TRUE(bitwise_equal(a.value(), Tensor::vector({0.0, 0.0, 0.0})));
        double mag = 0.0;
        for (double v : g[alpha].data()) mag += std::fabs(v);
        if (coarse) {
            EXPECT_GT(mag, 0.0);
        } else {
            EXPECT_EQ(mag, 0.0);
        }
    }
}
