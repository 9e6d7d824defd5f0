#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fraccos/special_functions.hpp"

using fraccos::FractionalOrder;
using fraccos::g_kernel;
using fraccos::KernelOrder;
using fraccos::log_gamma;
using fraccos::mittag_leffler;

TEST(Gamma, KnownValues) {
    EXPECT_NEAR(fraccos::gamma(0.5), std::sqrt(M_PI), 1e-13);
    EXPECT_NEAR(fraccos::gamma(1.0), 1.0, 1e-14);
    EXPECT_NEAR(fraccos::gamma(1.5), 0.5 * std::sqrt(M_PI), 1e-13);
    EXPECT_NEAR(fraccos::gamma(5.0), 24.0, 24.0 * 1e-14);
    EXPECT_NEAR(fraccos::gamma(10.0), 362880.0, 362880.0 * 1e-13);
}

TEST(Gamma, RecurrenceHolds) {
    for (double x : {0.3, 0.7, 1.2, 2.6, 4.9}) {
        EXPECT_NEAR(fraccos::gamma(x + 1.0), x * fraccos::gamma(x),
                    std::fabs(x * fraccos::gamma(x)) * 1e-12);
    }
}

TEST(Gamma, LogGammaConsistent) {
    for (double x : {0.5, 1.5, 3.25, 8.0, 20.0}) {
        EXPECT_NEAR(std::exp(log_gamma(x)), fraccos::gamma(x),
                    fraccos::gamma(x) * 1e-11);
    }
    // Beyond gamma's overflow territory the log form keeps working.
    EXPECT_NEAR(log_gamma(200.0), std::lgamma(200.0), std::fabs(std::lgamma(200.0)) * 1e-12);
}

TEST(GKernel, KnownShapes) {
    // g_1 = 1, g_2 = t, g_3 = t^2/2.
    EXPECT_NEAR(g_kernel(1.0, 0.7), 1.0, 1e-14);
    EXPECT_NEAR(g_kernel(2.0, 0.7), 0.7, 1e-14);
    EXPECT_NEAR(g_kernel(3.0, 2.0), 2.0, 1e-13);
    EXPECT_NEAR(g_kernel(0.5, 4.0), 0.5 / std::sqrt(M_PI), 1e-13);
}

TEST(GKernel, VanishesAtNonpositiveTime) {
    EXPECT_EQ(g_kernel(1.5, 0.0), 0.0);
    EXPECT_EQ(g_kernel(1.5, -1.0), 0.0);
    EXPECT_EQ(g_kernel(0.0, 0.7), 0.0);
    EXPECT_THROW(g_kernel(-0.5, 1.0), std::domain_error);
}

TEST(Gamma, RejectsNonpositiveArguments) {
    EXPECT_THROW(fraccos::gamma(0.0), std::domain_error);
    EXPECT_THROW(fraccos::gamma(-2.5), std::domain_error);
}

TEST(MittagLeffler, ReducesToExp) {
    for (double z : {-3.0, -0.5, 0.0, 0.5, 3.0}) {
        EXPECT_NEAR(mittag_leffler(1.0, 1.0, z), std::exp(z),
                    std::exp(std::fabs(z)) * 1e-13);
    }
}

TEST(MittagLeffler, ReducesToCoshAndSinh) {
    for (double t : {0.25, 1.0, 2.0}) {
        const double z = t * t;
        EXPECT_NEAR(mittag_leffler(2.0, 1.0, z), std::cosh(t), std::cosh(t) * 1e-13);
        EXPECT_NEAR(mittag_leffler(2.0, 2.0, z), std::sinh(t) / t,
                    std::sinh(t) / t * 1e-13);
        // Negative argument gives the trigonometric pair.
        EXPECT_NEAR(mittag_leffler(2.0, 1.0, -z), std::cos(t), 1e-13);
        EXPECT_NEAR(mittag_leffler(2.0, 2.0, -z), std::sin(t) / t, 1e-13);
    }
}

TEST(MittagLeffler, SeriesIdentityAtSecondParameter) {
    // E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z).
    const double a = 1.5, b = 1.0, z = 2.5;
    EXPECT_NEAR(mittag_leffler(a, b, z),
                1.0 / fraccos::gamma(b) + z * mittag_leffler(a, a + b, z), 1e-12);
}

TEST(MittagLeffler, DomainGuards) {
    EXPECT_THROW(mittag_leffler(0.0, 1.0, 1.0), std::domain_error);
    EXPECT_THROW(mittag_leffler(2.5, 1.0, 1.0), std::domain_error);
    EXPECT_THROW(mittag_leffler(1.5, 0.0, 1.0), std::domain_error);
    EXPECT_THROW(mittag_leffler(1.5, 1.0, fraccos::ml_z_max * 2.0), std::domain_error);
}

TEST(FractionalOrder, AcceptsTheHalfOpenInterval) {
    EXPECT_NO_THROW(FractionalOrder(1.0001));
    EXPECT_NO_THROW(FractionalOrder(1.5));
    EXPECT_NO_THROW(FractionalOrder(2.0));
    EXPECT_THROW(FractionalOrder(1.0), std::invalid_argument);
    EXPECT_THROW(FractionalOrder(0.5), std::invalid_argument);
    EXPECT_THROW(FractionalOrder(2.0001), std::invalid_argument);
}

TEST(KernelOrder, RequiresNonnegativeExponent) {
    EXPECT_NO_THROW(KernelOrder(0.3));
    EXPECT_NO_THROW(KernelOrder(0.0));
    EXPECT_THROW(KernelOrder(-1.0), std::invalid_argument);
}
