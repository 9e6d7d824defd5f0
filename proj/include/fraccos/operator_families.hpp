#pragma once

// Strongly continuous operator families of fractional order for a matrix
// generator A:
//
//   cosine kind            C_alpha(t) = E_{alpha,1}(t^alpha A)
//   sine kind              S_alpha(t) = t * E_{alpha,2}(t^alpha A)
//   Riemann-Liouville kind T_alpha(t) = t^(alpha-1) * E_{alpha,alpha}(t^alpha A)
//
// S_alpha is the running integral of C_alpha and T_alpha is the convolution
// of g_{alpha-1} with C_alpha; both facts are exercised by the test suite
// through independent quadrature.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fraccos/errors.hpp"
#include "fraccos/matrix.hpp"
#include "fraccos/quadrature.hpp"
#include "fraccos/special_functions.hpp"

namespace fraccos {

enum class FamilyKind { cosine, sine, riemann_liouville };

struct FamilyEvaluation {
    double t;
    FamilyKind kind;
    Matrix value;
};

// Exponential growth envelope ||C_alpha(t)|| <= M e^(omega t), estimated on
// a grid.  M is floored at 1 because every cosine-kind family starts at the
// identity.
struct ExponentialBound {
    double M = 1.0;
    double omega = 0.0;
};

// E_{a,b}(X) for a square matrix argument by the raw power series.  No
// scaling-and-squaring is attempted: the documented domain ||X|| <= ml_z_max
// (max row sum) keeps the series short, and arguments outside it are
// rejected up front.
inline Matrix mittag_leffler(double a, double b, const Matrix& X, int term_cap = 512) {
    if (!X.square())
        throw std::invalid_argument("mittag_leffler: matrix argument must be square");
    if (!(a > 0.0) || !(a <= 2.0) || !(b > 0.0))
        throw std::domain_error("mittag_leffler: parameters out of range");
    if (!(X.inf_norm() <= ml_z_max))
        throw std::domain_error("mittag_leffler: ||X|| exceeds documented domain " +
                                std::to_string(ml_z_max));

    const std::size_t d = X.rows();
    Matrix power = Matrix::identity(d);
    Matrix sum(d, d);
    double prev_mag = 0.0;
    bool decreasing = false;
    for (int k = 0; k <= term_cap; ++k) {
        const double coeff = std::exp(-log_gamma(a * k + b));
        const Matrix term = power * coeff;
        sum += term;
        const double mag = term.inf_norm();
        if (k > 0) decreasing = mag <= prev_mag;
        if (k > 0 && decreasing && mag < 1e-15 * (1.0 + sum.inf_norm())) return sum;
        prev_mag = mag;
        power = power * X;
    }
    throw nonconvergence("mittag_leffler: matrix series did not settle within " +
                         std::to_string(term_cap) + " terms");
}

inline Matrix cosine_matrix(double alpha, double t, const Matrix& A) {
    FractionalOrder order(alpha);
    if (t < 0.0) throw std::domain_error("cosine_matrix: t must be nonnegative");
    if (t == 0.0) return Matrix::identity(A.rows());
    return mittag_leffler(alpha, 1.0, A * std::pow(t, alpha));
}

inline Matrix sine_matrix(double alpha, double t, const Matrix& A) {
    FractionalOrder order(alpha);
    if (t < 0.0) throw std::domain_error("sine_matrix: t must be nonnegative");
    if (t == 0.0) return Matrix(A.rows(), A.cols());
    return mittag_leffler(alpha, 2.0, A * std::pow(t, alpha)) * t;
}

inline Matrix rl_matrix(double alpha, double t, const Matrix& A) {
    FractionalOrder order(alpha);
    if (t < 0.0) throw std::domain_error("rl_matrix: t must be nonnegative");
    if (t == 0.0) return Matrix(A.rows(), A.cols());
    return mittag_leffler(alpha, alpha, A * std::pow(t, alpha)) * std::pow(t, alpha - 1.0);
}

inline FamilyEvaluation cosine_family(double alpha, double t, const Matrix& A) {
    return {t, FamilyKind::cosine, cosine_matrix(alpha, t, A)};
}

inline FamilyEvaluation sine_family(double alpha, double t, const Matrix& A) {
    return {t, FamilyKind::sine, sine_matrix(alpha, t, A)};
}

inline FamilyEvaluation rl_family(double alpha, double t, const Matrix& A) {
    return {t, FamilyKind::riemann_liouville, rl_matrix(alpha, t, A)};
}

// Defining identity of the cosine kind.  With F = the fractional integral of
// order alpha of the family, computed by product quadrature,
//
//   C(s) F(t) - F(s) C(t) - F(t) + F(s) = 0
//
// must hold for every s, t >= 0.  Returns the residual norm at the finest
// refinement level; throws nonconvergence when refining the quadrature
// stops improving an estimate that is still above quad.target_tol.
inline double check_functional_equation(double alpha, const Matrix& A, double s, double t,
                                        const QuadratureConfig& quad) {
    FractionalOrder order(alpha);
    quad.validate();
    if (s < 0.0 || t < 0.0)
        throw std::domain_error("check_functional_equation: s, t must be nonnegative");
    const std::size_t d = A.rows();
    const MatrixFn sampler = [&](double tau) { return cosine_matrix(alpha, tau, A); };

    const auto residual_at = [&](const QuadratureConfig& q) {
        const Matrix Fs = fractional_integral(alpha, sampler, s, q, d);
        const Matrix Ft = fractional_integral(alpha, sampler, t, q, d);
        const Matrix Cs = cosine_matrix(alpha, s, A);
        const Matrix Ct = cosine_matrix(alpha, t, A);
        return (Cs * Ft - Fs * Ct - Ft + Fs).inf_norm();
    };

    QuadratureConfig level = quad;
    double res = residual_at(level);
    for (int round = 0; round < 3; ++round) {
        if (res <= quad.target_tol) return res;
        QuadratureConfig next = level;
        next.panels *= level.refinement_factor;
        const double res_next = residual_at(next);
        if (res_next > 0.5 * res)
            throw nonconvergence(
                "check_functional_equation: residual stalled at " + std::to_string(res_next));
        level = next;
        res = res_next;
    }
    return res;
}

// Difference quotients Gamma(alpha+1) (C_alpha(t) x - x) / t^alpha, which
// approach A x as t -> 0+ with error O(t^alpha).
inline std::vector<Vec> generator_limit(double alpha, const Matrix& A, const Vec& x,
                                        const std::vector<double>& t_list) {
    FractionalOrder order(alpha);
    const double gamma_factor = gamma(alpha + 1.0);
    std::vector<Vec> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        if (!(t > 0.0))
            throw std::domain_error("generator_limit: t values must be positive");
        const Vec cx = cosine_matrix(alpha, t, A) * x;
        Vec q(x.size());
        const double scale = gamma_factor / std::pow(t, alpha);
        for (std::size_t i = 0; i < x.size(); ++i) q[i] = scale * (cx[i] - x[i]);
        out.push_back(std::move(q));
    }
    return out;
}

// Growth envelope estimate.  For symmetric generators the rate comes from
// the top of the spectrum (the family grows like exp(mu_max^(1/alpha) t)
// when mu_max > 0); otherwise the norm serves as a spectral radius bound.
// M is then the grid maximum of ||C_alpha(t)|| e^(-omega t), floored at 1.
inline ExponentialBound estimate_exponential_bound(double alpha, const Matrix& A,
                                                   const std::vector<double>& t_grid) {
    FractionalOrder order(alpha);
    if (t_grid.empty())
        throw std::invalid_argument("estimate_exponential_bound: empty grid");
    double rate_base = 0.0;
    if (A.is_symmetric(1e-9)) {
        const SymmetricEigen eig = symmetric_eigen(A);
        rate_base = eig.values.empty() ? 0.0 : eig.values.back();
    } else {
        rate_base = A.inf_norm();
    }
    ExponentialBound bound;
    bound.omega = rate_base > 0.0 ? std::pow(rate_base, 1.0 / alpha) : 0.0;
    bound.M = 1.0;
    for (double t : t_grid) {
        if (t < 0.0) continue;
        const double norm = cosine_matrix(alpha, t, A).inf_norm();
        bound.M = std::max(bound.M, norm * std::exp(-bound.omega * t));
    }
    return bound;
}

}  // namespace fraccos
