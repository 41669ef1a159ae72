#include <gtest/gtest.h>

#include <cmath>

#include "kgl/gl_kernel.hpp"
#include "support.hpp"

using namespace kgl;

TEST(GLKernel, HandValues) {
    const auto w2 = gl_weights(0.2, 3).weights;
    const double e2[] = {1.0, -0.2, -0.08, -0.048};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(w2[j], e2[j], 1e-15);

    const auto w5 = gl_weights(0.5, 3).weights;
    const double e5[] = {1.0, -0.5, -0.125, -0.0625};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(w5[j], e5[j], 1e-15);
}

TEST(GLKernel, SingleLag) {
    const auto k = gl_weights(0.7, 1);
    ASSERT_EQ(k.weights.size(), 2u);
    EXPECT_EQ(k.weights[0], 1.0);
    EXPECT_DOUBLE_EQ(k.weights[1], -0.7);
}

TEST(GLKernel, MatchesClosedForm) {
    for (int a = 1; a <= 9; ++a) {
        const double alpha = a / 10.0;
        const auto w = gl_weights(alpha, 50).weights;
        for (std::size_t j = 0; j <= 50; ++j) {
            const double ref = kgl::testing::gl_closed_form(alpha, j);
            EXPECT_LE(std::abs(w[j] - ref), 1e-12 * std::abs(ref)) << "alpha " << alpha << " j " << j;
        }
    }
}

TEST(GLKernel, SignsAndPartialSums) {
    for (double alpha : {0.05, 0.3, 0.5, 0.95}) {
        const auto w = gl_weights(alpha, 400).weights;
        double partial = 1.0;
        for (std::size_t j = 1; j < w.size(); ++j) {
            EXPECT_LT(w[j], 0.0);
            const double next = partial + w[j];
            EXPECT_LT(next, partial);
            EXPECT_GT(next, 0.0);
            partial = next;
        }
    }
}

TEST(GLKernel, RejectsBadArguments) {
    EXPECT_THROW(gl_weights(0.0, 5), DomainError);
    EXPECT_THROW(gl_weights(1.0, 5), DomainError);
    EXPECT_THROW(gl_weights(-0.3, 5), DomainError);
    EXPECT_THROW(gl_weights(0.5, 0), DomainError);
    EXPECT_THROW(tail_mass(0.5, 10, 10), DomainError);
    EXPECT_THROW(fit_decay_constant(0.5, 9), DomainError);
}

TEST(GLKernel, MarkovKernelIsTrivial) {
    const auto k = markov_kernel();
    EXPECT_TRUE(k.is_markov());
    EXPECT_EQ(k.weights, std::vector<double>{1.0});
}

TEST(TailMass, MatchesDirectSummation) {
    const auto w = gl_weights(0.4, 2000).weights;
    double direct = 0.0;
    for (std::size_t j = 2000; j > 100; --j) direct += std::abs(w[j]);
    EXPECT_NEAR(tail_mass(0.4, 100, 2000), direct, 1e-15);
}

TEST(TailMass, StrictlyDecreasingInMemory) {
    for (double alpha : {0.1, 0.5, 0.9}) {
        double prev = tail_mass(alpha, 1, 200'000);
        for (std::size_t n : {2, 10, 50, 100, 400}) {
            const double t = tail_mass(alpha, n, 200'000);
            EXPECT_LT(t, prev);
            prev = t;
        }
    }
}

TEST(TailMass, BelowTheAsymptoticBound) {
    for (double alpha : {0.2, 0.5, 0.8}) {
        const double c = fit_decay_constant(alpha, 100'000);
        for (std::size_t n : {10, 50, 100, 400}) {
            EXPECT_LE(tail_mass(alpha, n, 1'000'000), c / alpha * std::pow(static_cast<double>(n), -alpha));
        }
    }
}

TEST(DecayConstant, DominatesEveryTerm) {
    const double alpha = 0.3;
    const double c = fit_decay_constant(alpha, 5000);
    const auto w = gl_weights(alpha, 5000).weights;
    for (std::size_t j = 1; j < w.size(); ++j) {
        EXPECT_LE(std::abs(w[j]), c * std::pow(static_cast<double>(j), -(1.0 + alpha)) * (1 + 1e-14));
    }
}

TEST(DecayConstant, NondecreasingInHorizon) {
    double prev = 0.0;
    for (std::size_t j_max : {10, 100, 1000, 10000}) {
        const double c = fit_decay_constant(0.6, j_max);
        EXPECT_GE(c, prev);
        prev = c;
    }
}
