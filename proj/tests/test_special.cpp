#include <gtest/gtest.h>

#include <cmath>

#include "hawkes/rng.hpp"
#include "hawkes/special_functions.hpp"

namespace {

using hawkes::gamma_quantile;
using hawkes::normal_quantile;
using hawkes::reg_gamma_p;

// Integer and half-integer shapes have closed forms, which give an
// implementation-independent check of the series/continued-fraction code.
TEST(RegGammaP, MatchesClosedFormsAtSpecialShapes) {
    for (double x : {0.01, 0.3, 1.0, 2.0, 5.0, 20.0}) {
        EXPECT_NEAR(reg_gamma_p(1.0, x), 1.0 - std::exp(-x), 1e-13);
        EXPECT_NEAR(reg_gamma_p(2.0, x), 1.0 - std::exp(-x) * (1.0 + x), 1e-13);
        EXPECT_NEAR(reg_gamma_p(3.0, x), 1.0 - std::exp(-x) * (1.0 + x + 0.5 * x * x), 1e-13);
        EXPECT_NEAR(reg_gamma_p(0.5, x), std::erf(std::sqrt(x)), 1e-13);
    }
}

TEST(RegGammaP, BoundaryBehaviour) {
    EXPECT_EQ(reg_gamma_p(2.5, 0.0), 0.0);
    EXPECT_EQ(reg_gamma_p(2.5, -1.0), 0.0);
    EXPECT_EQ(reg_gamma_p(2.5, std::numeric_limits<double>::infinity()), 1.0);
    EXPECT_THROW((void)reg_gamma_p(0.0, 1.0), std::invalid_argument);

    double prev = 0.0;
    for (double x = 0.1; x < 30.0; x += 0.1) {
        const double p = reg_gamma_p(3.7, x);
        EXPECT_GE(p, prev);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
}

TEST(NormalQuantile, KnownValuesAndRoundTrip) {
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-11);
    EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514722, 1e-11);
    for (double p : {1e-10, 1e-4, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
        const double z = normal_quantile(p);
        const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
        EXPECT_NEAR(back, p, 1e-14 + 1e-12 * p) << "p=" << p;
    }
    EXPECT_EQ(normal_quantile(0.0), -std::numeric_limits<double>::infinity());
    EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
    EXPECT_THROW((void)normal_quantile(-0.1), std::invalid_argument);
}

TEST(GammaQuantile, ShapeOneIsExponential) {
    for (double p : {0.05, 0.5, 0.95, 0.999}) {
        EXPECT_NEAR(gamma_quantile(1.0, p), -std::log1p(-p), 1e-10 * std::abs(std::log1p(-p)) + 1e-12);
    }
}

TEST(GammaQuantile, InvertsTheCdf) {
    hawkes::RngStream rng(11);
    for (int i = 0; i < 50; ++i) {
        const double shape = 0.3 + 9.7 * rng.uniform();
        const double p = 0.01 + 0.98 * rng.uniform();
        const double x = gamma_quantile(shape, p);
        EXPECT_NEAR(reg_gamma_p(shape, x), p, 1e-10) << "shape=" << shape << " p=" << p;
    }
}

TEST(GammaQuantile, RejectsBadArguments) {
    EXPECT_THROW((void)gamma_quantile(-1.0, 0.5), std::invalid_argument);
    EXPECT_THROW((void)gamma_quantile(2.0, 0.0), std::invalid_argument);
    EXPECT_THROW((void)gamma_quantile(2.0, 1.0), std::invalid_argument);
}

}  // namespace
