#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fraccos/resolvent.hpp"

#include "test_support.hpp"

using fraccos::Matrix;
using fraccos::NeumannReport;
using fraccos::ResolventBoundCheck;
using fraccos::ResolventPoint;

TEST(ResolventPoint, Validation) {
    EXPECT_NO_THROW(ResolventPoint(2.0, 1.5));
    EXPECT_THROW(ResolventPoint(0.0, 1.5), std::invalid_argument);
    EXPECT_THROW(ResolventPoint(-1.0, 1.5), std::invalid_argument);
    EXPECT_THROW(ResolventPoint(2.0, 1.0), std::invalid_argument);
    EXPECT_NEAR(ResolventPoint(2.0, 1.5).lambda_alpha(), std::pow(2.0, 1.5), 1e-15);
}

TEST(Resolvent, ScalarOracle) {
    const ResolventPoint point(2.0, 1.5);
    const Matrix R = fraccos::resolvent(point, testutil::scalar(1.0));
    EXPECT_NEAR(R(0, 0), 1.0 / (std::pow(2.0, 1.5) - 1.0), 1e-14);
}

TEST(Resolvent, ZeroGeneratorIsScaledIdentity) {
    // lambda^alpha = 2 at lambda = 2^(2/3), alpha = 3/2.
    const ResolventPoint point(std::pow(2.0, 2.0 / 3.0), 1.5);
    const Matrix R = fraccos::resolvent(point, Matrix(3, 3));
    EXPECT_LT(testutil::max_entry_diff(R, Matrix::identity(3) * 0.5), 1e-14);
}

TEST(Resolvent, SpectrumHitThrows) {
    // lambda^alpha = 8 lands exactly on the eigenvalue 8.
    EXPECT_THROW(fraccos::resolvent(ResolventPoint(4.0, 1.5), testutil::scalar(8.0)),
                 fraccos::singular_matrix);
    // Near miss with a huge spread trips the condition cap instead.
    const Matrix near_hit = testutil::diagonal({8.0 - 1e-12, 0.0});
    EXPECT_THROW(fraccos::resolvent(ResolventPoint(4.0, 1.5), near_hit),
                 fraccos::singular_matrix);
}

TEST(NeumannResolvent, UnperturbedCollapsesToOneTerm) {
    const ResolventPoint point(2.0, 1.5);
    const Matrix A = testutil::random_symmetric(3, 1.5, 19u);
    const Matrix B(3, 3);
    const auto [value, report] = fraccos::neumann_resolvent(point, A, B);
    EXPECT_EQ(report.n_terms, 1);
    EXPECT_EQ(report.theta, 0.0);
    EXPECT_EQ(report.bound_rhs, 0.0);
    EXPECT_EQ(testutil::max_entry_diff(value, fraccos::resolvent(point, A)), 0.0);
}

TEST(NeumannResolvent, MatchesDirectInversion) {
    const ResolventPoint point(2.0, 1.5);
    const Matrix A = testutil::random_symmetric(3, 2.0, 23u);
    const Matrix B = testutil::random_symmetric(3, 0.15, 29u);
    const auto [value, report] = fraccos::neumann_resolvent(point, A, B);
    ASSERT_LT(report.theta, 0.5);
    const Matrix direct =
        fraccos::inverse(Matrix::identity(3) * point.lambda_alpha() - A - B);
    EXPECT_LT(testutil::max_entry_diff(value, direct), 1e-10);
}

TEST(NeumannResolvent, TermsDecayGeometrically) {
    const ResolventPoint point(2.0, 1.5);
    const Matrix A = testutil::random_symmetric(3, 2.0, 31u);
    const Matrix B = testutil::random_symmetric(3, 0.3, 37u);
    const auto [value, report] = fraccos::neumann_resolvent(point, A, B);
    const double R_norm = fraccos::resolvent(point, A).inf_norm();
    ASSERT_GE(report.n_terms, 3);
    for (int n = 1; n < report.n_terms; ++n) {
        const double term_norm =
            (report.partial_sums[n] - report.partial_sums[n - 1]).inf_norm();
        EXPECT_LE(term_norm, R_norm * std::pow(report.theta, n) * (1.0 + 1e-12))
            << "term " << n;
    }
    EXPECT_NEAR(report.bound_rhs, R_norm * report.theta / (1.0 - report.theta), 1e-13);
    // The summed deviation from the zeroth term obeys the same bound.
    EXPECT_LE((value - report.partial_sums[0]).inf_norm(), report.bound_rhs * (1.0 + 1e-12));
}

TEST(NeumannResolvent, DivergentPerturbationThrows) {
    const ResolventPoint point(1.0, 1.5);
    EXPECT_THROW(
        fraccos::neumann_resolvent(point, testutil::scalar(0.0), testutil::scalar(2.0)),
        fraccos::hypothesis_violation);
}

TEST(NeumannResolvent, TermCapThrows) {
    const ResolventPoint point(1.0, 1.5);
    // theta = 0.9 needs far more than 3 terms to reach 1e-12.
    EXPECT_THROW(fraccos::neumann_resolvent(point, testutil::scalar(0.0),
                                            testutil::scalar(0.9), 1e-12, 3),
                 fraccos::nonconvergence);
}

TEST(LemmaBound, TightScalarCase) {
    // A = 0, lambda^alpha = 1, b = 1/2: both sides equal 1.
    const ResolventPoint point(1.0, 1.5);
    const ResolventBoundCheck check =
        fraccos::lemma_bound_check(point, testutil::scalar(0.0), testutil::scalar(0.5));
    EXPECT_NEAR(check.theta, 0.5, 1e-15);
    EXPECT_NEAR(check.lhs, 1.0, 1e-12);
    EXPECT_NEAR(check.rhs, 1.0, 1e-12);
}

TEST(LemmaBound, HoldsOnRandomInstances) {
    const ResolventPoint point(2.0, 1.25);
    const Matrix A = testutil::random_symmetric(4, 1.2, 41u);
    const Matrix B = testutil::random_symmetric(4, 0.2, 43u);
    const ResolventBoundCheck check = fraccos::lemma_bound_check(point, A, B);
    ASSERT_LT(check.theta, 1.0);
    EXPECT_GE(check.rhs - check.lhs, -1e-10);
}

TEST(LemmaBound, DivergentPerturbationThrows) {
    const ResolventPoint point(1.0, 1.5);
    EXPECT_THROW(
        fraccos::lemma_bound_check(point, testutil::scalar(0.0), testutil::scalar(1.5)),
        fraccos::hypothesis_violation);
}

TEST(CorollaryScaled, ReducesToLemmaAtUnitLambda) {
    const ResolventPoint point(1.0, 1.5);
    const Matrix A = testutil::scalar(0.0);
    const Matrix B = testutil::scalar(0.5);
    const ResolventBoundCheck lemma = fraccos::lemma_bound_check(point, A, B);
    const ResolventBoundCheck scaled = fraccos::corollary_scaled_check(point, A, B);
    EXPECT_NEAR(scaled.lhs, lemma.lhs, 1e-14);
    EXPECT_NEAR(scaled.rhs, lemma.rhs, 1e-14);
    EXPECT_LT(scaled.term_consistency, 1e-12);
}

TEST(CorollaryScaled, ScalesTheLemmaByLambdaPower) {
    const double alpha = 1.5;
    const ResolventPoint point(2.0, alpha);
    const Matrix A = testutil::random_symmetric(3, 1.5, 47u);
    const Matrix B = testutil::random_symmetric(3, 0.2, 53u);
    const ResolventBoundCheck lemma = fraccos::lemma_bound_check(point, A, B);
    const ResolventBoundCheck scaled = fraccos::corollary_scaled_check(point, A, B);
    const double scale = std::pow(2.0, alpha - 1.0);
    EXPECT_NEAR(scaled.lhs, scale * lemma.lhs, 1e-12);
    EXPECT_NEAR(scaled.rhs, scale * lemma.rhs, 1e-12);
    EXPECT_GE(scaled.rhs - scaled.lhs, -1e-10);
    EXPECT_LT(scaled.term_consistency, 1e-10);
}
