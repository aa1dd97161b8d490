#include "dsparse/errors.hpp"
#include "dsparse/rng.hpp"
#include "dsparse/schedule.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace dsparse;

TEST(LambdaAt, Endpoints) {
    const LambdaSchedule s{0.25, 3e-3, 10, 40};
    EXPECT_EQ(lambda_at(s, 10), 0.25);
    EXPECT_EQ(lambda_at(s, 50), 3e-3);
    EXPECT_EQ(lambda_at(s, -5), 0.25);
    EXPECT_EQ(lambda_at(s, 1000), 3e-3);
}

TEST(LambdaAt, Midpoint) {
    const LambdaSchedule s{0.0, 1e-3, 7, 100};
    EXPECT_NEAR(lambda_at(s, 57), 8.75e-4, 1e-18);
}

TEST(LambdaAt, MonotoneAndBounded) {
    Rng rng(61);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.uniform(0, 1e-2), b = rng.uniform(0, 1e-2);
        const long t0 = static_cast<long>(rng.index(20));
        const long n = 1 + static_cast<long>(rng.index(200));
        const LambdaSchedule s{a, b, t0, n};
        double prev = lambda_at(s, t0 - 1);
        for (long t = t0; t <= t0 + n + 1; ++t) {
            const double v = lambda_at(s, t);
            if (a <= b) {
                EXPECT_GE(v, prev);
            } else {
                EXPECT_LE(v, prev);
            }
            EXPECT_GE(v, std::min(a, b));
            EXPECT_LE(v, std::max(a, b));
            prev = v;
        }
    }
}

TEST(LambdaSchedule, Validation) {
    EXPECT_THROW((LambdaSchedule{0, 1, 0, 0}.validate()), ConfigError);
    EXPECT_THROW((LambdaSchedule{-1, 1, 0, 5}.validate()), ConfigError);
    EXPECT_THROW((LambdaSchedule{0, -1, 0, 5}.validate()), ConfigError);
    EXPECT_NO_THROW((LambdaSchedule{0, 1, 0, 5}.validate()));
}
