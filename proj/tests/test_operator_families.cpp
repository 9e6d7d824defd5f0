#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fraccos/operator_families.hpp"

#include "test_support.hpp"

using fraccos::cosine_matrix;
using fraccos::ExponentialBound;
using fraccos::Matrix;
using fraccos::mittag_leffler;
using fraccos::QuadratureConfig;
using fraccos::rl_matrix;
using fraccos::sine_matrix;
using fraccos::Vec;

TEST(Families, ClassicalScalarOracles) {
    // alpha = 2 with a scalar generator gives cos/cosh and sin/sinh.
    for (double t : {0.25, 1.0, 2.0}) {
        EXPECT_NEAR(cosine_matrix(2.0, t, testutil::scalar(-1.0))(0, 0), std::cos(t), 1e-13);
        EXPECT_NEAR(cosine_matrix(2.0, t, testutil::scalar(1.0))(0, 0), std::cosh(t),
                    std::cosh(t) * 1e-13);
        EXPECT_NEAR(sine_matrix(2.0, t, testutil::scalar(-1.0))(0, 0), std::sin(t), 1e-13);
        EXPECT_NEAR(sine_matrix(2.0, t, testutil::scalar(1.0))(0, 0), std::sinh(t),
                    std::sinh(t) * 1e-13);
        // At alpha = 2 the Riemann-Liouville kind coincides with the sine kind.
        EXPECT_NEAR(rl_matrix(2.0, t, testutil::scalar(-1.0))(0, 0), std::sin(t), 1e-13);
    }
}

TEST(Families, DiagonalGeneratorReducesToScalarSeries) {
    const Matrix A = testutil::diagonal({-1.0, -4.0});
    const double alpha = 1.5, t = 0.8;
    const double ta = std::pow(t, alpha);
    const Matrix C = cosine_matrix(alpha, t, A);
    const Matrix S = sine_matrix(alpha, t, A);
    const Matrix T = rl_matrix(alpha, t, A);
    for (std::size_t i = 0; i < 2; ++i) {
        const double mu = A(i, i) * ta;
        EXPECT_NEAR(C(i, i), mittag_leffler(alpha, 1.0, mu), 1e-13);
        EXPECT_NEAR(S(i, i), t * mittag_leffler(alpha, 2.0, mu), 1e-13);
        EXPECT_NEAR(T(i, i), std::pow(t, alpha - 1.0) * mittag_leffler(alpha, alpha, mu),
                    1e-13);
    }
    EXPECT_NEAR(C(0, 1), 0.0, 0.0);
    EXPECT_NEAR(S(1, 0), 0.0, 0.0);
}

TEST(Families, InitialValues) {
    const Matrix A = testutil::random_symmetric(3, 2.0, 5u);
    const Matrix C0 = cosine_matrix(1.5, 0.0, A);
    const Matrix S0 = sine_matrix(1.5, 0.0, A);
    const Matrix T0 = rl_matrix(1.5, 0.0, A);
    EXPECT_EQ(testutil::max_entry_diff(C0, Matrix::identity(3)), 0.0);
    EXPECT_EQ(S0.max_abs(), 0.0);
    EXPECT_EQ(T0.max_abs(), 0.0);
    EXPECT_THROW(cosine_matrix(1.5, -0.1, A), std::domain_error);
    EXPECT_THROW(cosine_matrix(1.0, 1.0, A), std::invalid_argument);
}

TEST(Families, MatrixSeriesMatchesEigendecomposition) {
    const Matrix A = testutil::random_symmetric(4, 3.0, 13u);
    const double alpha = 1.75, t = 1.2;
    const fraccos::SymmetricEigen eig = fraccos::symmetric_eigen(A);
    const double ta = std::pow(t, alpha);

    Matrix diag_c(4, 4), diag_s(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        diag_c(i, i) = mittag_leffler(alpha, 1.0, eig.values[i] * ta);
        diag_s(i, i) = t * mittag_leffler(alpha, 2.0, eig.values[i] * ta);
    }
    const Matrix want_c = eig.vectors * diag_c * eig.vectors.transposed();
    const Matrix want_s = eig.vectors * diag_s * eig.vectors.transposed();

    EXPECT_LT(testutil::max_entry_diff(cosine_matrix(alpha, t, A), want_c), 1e-9);
    EXPECT_LT(testutil::max_entry_diff(sine_matrix(alpha, t, A), want_s), 1e-9);
}

TEST(Families, SineIsTheTimeIntegralOfCosine) {
    // S(t) = integral_0^t C(s) ds, checked by the library's own quadrature.
    const Matrix A = testutil::random_symmetric(2, 1.5, 3u);
    const double alpha = 1.5, t = 1.3;
    QuadratureConfig quad;
    quad.panels = 24;
    const fraccos::MatrixFn C = [&](double s) { return cosine_matrix(alpha, s, A); };
    const Matrix integral = fraccos::fractional_integral(1.0, C, t, quad, 2);
    EXPECT_LT(testutil::max_entry_diff(integral, sine_matrix(alpha, t, A)), 1e-9);
}

TEST(Families, RiemannLiouvilleKindIsTheFractionalIntegralOfCosine) {
    const Matrix A = testutil::random_symmetric(2, 1.5, 9u);
    const double alpha = 1.5, t = 1.1;
    QuadratureConfig quad;
    const fraccos::MatrixFn C = [&](double s) { return cosine_matrix(alpha, s, A); };
    const Matrix integral = fraccos::fractional_integral(alpha - 1.0, C, t, quad, 2);
    EXPECT_LT(testutil::max_entry_diff(integral, rl_matrix(alpha, t, A)), 1e-9);
}

TEST(FunctionalEquation, HoldsForSymmetricGenerators) {
    QuadratureConfig quad;
    const Matrix A = testutil::random_symmetric(2, 2.0, 21u);
    for (double alpha : {1.25, 1.5, 2.0}) {
        const double res = fraccos::check_functional_equation(alpha, A, 0.6, 1.4, quad);
        EXPECT_LT(res, 1e-8) << "alpha = " << alpha;
    }
}

TEST(GeneratorLimit, RecoversTheGenerator) {
    const Matrix A = testutil::random_symmetric(3, 2.5, 17u);
    const Vec x{1.0, -0.5, 0.25};
    const Vec ax = A * x;
    const double alpha = 1.5;
    const std::vector<double> t_list{1e-2, 1e-3};
    const std::vector<Vec> approx = fraccos::generator_limit(alpha, A, x, t_list);
    ASSERT_EQ(approx.size(), 2u);

    // The deviation from Ax shrinks like t^alpha.
    double err_prev = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            err = std::max(err, std::fabs(approx[j][i] - ax[i]));
        if (j == 1) {
            const double order = std::log10(err_prev / err);
            EXPECT_GT(order, 1.4);  // t ratio 10, so expect ~alpha decades
        }
        err_prev = err;
    }
    EXPECT_THROW(fraccos::generator_limit(alpha, A, x, {0.0}), std::domain_error);
}

TEST(ExponentialBound, ZeroGeneratorIsFlat) {
    const Matrix A(2, 2);
    const std::vector<double> grid = testutil::linspace(0.1, 3.0, 12);
    const ExponentialBound bound = fraccos::estimate_exponential_bound(1.5, A, grid);
    EXPECT_EQ(bound.omega, 0.0);
    EXPECT_NEAR(bound.M, 1.0, 1e-12);
}

TEST(ExponentialBound, NegativeSpectrumStaysBounded) {
    const Matrix A = testutil::diagonal({-1.0, -4.0});
    const std::vector<double> grid = testutil::linspace(0.1, 5.0, 20);
    const ExponentialBound bound = fraccos::estimate_exponential_bound(2.0, A, grid);
    EXPECT_EQ(bound.omega, 0.0);
    EXPECT_LT(bound.M, 1.0 + 1e-9);
}

TEST(ExponentialBound, PositiveSpectrumSetsTheRate) {
    const Matrix A = testutil::diagonal({4.0});
    const std::vector<double> grid = testutil::linspace(0.1, 3.0, 12);
    for (double alpha : {1.5, 2.0}) {
        const ExponentialBound bound = fraccos::estimate_exponential_bound(alpha, A, grid);
        EXPECT_NEAR(bound.omega, std::pow(4.0, 1.0 / alpha), 1e-12);
        // E_{alpha,1}(t^alpha mu) <= M e^{mu^{1/alpha} t} must hold on the grid.
        for (double t : grid) {
            EXPECT_LE(cosine_matrix(alpha, t, A).inf_norm(),
                      bound.M * std::exp(bound.omega * t) * (1.0 + 1e-12));
        }
    }
}
