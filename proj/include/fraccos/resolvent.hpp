#pragma once

// Resolvents R(lambda^alpha; A) = (lambda^alpha I - A)^(-1) and the Neumann
// expansion of the perturbed resolvent
//
//   R(lambda^alpha; A + B) = sum_n R(lambda^alpha; A) [B R(lambda^alpha; A)]^n,
//
// valid whenever theta = ||B R(lambda^alpha; A)|| < 1.  Direct LU inversion
// acts as the oracle the expansion is checked against.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fraccos/errors.hpp"
#include "fraccos/matrix.hpp"
#include "fraccos/special_functions.hpp"

namespace fraccos {

struct ResolventPoint {
    double lambda;
    double alpha;

    ResolventPoint(double lambda_, double alpha_) : lambda(lambda_), alpha(alpha_) {
        FractionalOrder order(alpha);
        if (!(lambda > 0.0))
            throw std::invalid_argument("ResolventPoint: lambda must be positive");
    }

    double lambda_alpha() const { return std::pow(lambda, alpha); }
};

inline constexpr double resolvent_condition_cap = 1e12;

// (lambda^alpha I - A)^(-1) by LU with one refinement pass.  Rejects points
// whose shifted matrix is singular or too ill-conditioned to trust.
inline Matrix resolvent(const ResolventPoint& point, const Matrix& A) {
    if (!A.square()) throw std::invalid_argument("resolvent: generator must be square");
    Matrix shifted = Matrix::identity(A.rows()) * point.lambda_alpha() - A;
    Matrix inv = inverse(shifted);
    if (condition_estimate(shifted, inv) > resolvent_condition_cap)
        throw singular_matrix("resolvent: shifted matrix condition exceeds cap");
    return inv;
}

struct NeumannReport {
    double theta = 0.0;                // ||B R(lambda^alpha; A)||
    int n_terms = 0;                   // terms accumulated, counting n = 0
    std::vector<Matrix> partial_sums;  // partial_sums[n] = sum of terms 0..n
    double bound_rhs = 0.0;            // ||R|| theta / (1 - theta)
};

// Sums the expansion, stopping once the next term's norm drops below tol.
// Throws hypothesis_violation when theta >= 1 (the series diverges there; no
// fallback is attempted) and nonconvergence when term_cap is reached first.
inline std::pair<Matrix, NeumannReport> neumann_resolvent(const ResolventPoint& point,
                                                          const Matrix& A, const Matrix& B,
                                                          double tol = 1e-12,
                                                          int term_cap = 256) {
    const Matrix R = resolvent(point, A);
    const Matrix BR = B * R;
    const double theta = BR.inf_norm();
    if (theta >= 1.0)
        throw hypothesis_violation("neumann_resolvent: ||B R|| = " + std::to_string(theta) +
                                   " >= 1");

    NeumannReport report;
    report.theta = theta;
    report.bound_rhs = R.inf_norm() * theta / (1.0 - theta);

    Matrix term = R;
    Matrix sum = R;
    report.partial_sums.push_back(sum);
    while (true) {
        term = term * BR;
        if (term.inf_norm() < tol) break;
        if (static_cast<int>(report.partial_sums.size()) >= term_cap)
            throw nonconvergence("neumann_resolvent: term cap " + std::to_string(term_cap) +
                                 " reached before the terms fell under tolerance");
        sum += term;
        report.partial_sums.push_back(sum);
    }
    report.n_terms = static_cast<int>(report.partial_sums.size());
    return {sum, report};
}

struct ResolventBoundCheck {
    double theta = 0.0;
    double lhs = 0.0;               // measured deviation between the two resolvents
    double rhs = 0.0;               // ||R|| theta / (1 - theta), scaled as appropriate
    double term_consistency = 0.0;  // scaled partial sums vs scaled expansion, max gap
};

// ||R(lambda^alpha; A+B) - R(lambda^alpha; A)|| <= ||R|| theta / (1 - theta),
// the left side evaluated through the LU oracle.
inline ResolventBoundCheck lemma_bound_check(const ResolventPoint& point, const Matrix& A,
                                             const Matrix& B) {
    const Matrix R = resolvent(point, A);
    const double theta = (B * R).inf_norm();
    if (theta >= 1.0)
        throw hypothesis_violation("lemma_bound_check: ||B R|| >= 1");
    const Matrix R_pert =
        inverse(Matrix::identity(A.rows()) * point.lambda_alpha() - A - B);
    ResolventBoundCheck check;
    check.theta = theta;
    check.lhs = (R_pert - R).inf_norm();
    check.rhs = R.inf_norm() * theta / (1.0 - theta);
    return check;
}

// Same statement with both resolvents scaled by lambda^(alpha-1), the form
// the cosine-kind transform consumes.  The lhs is the lemma lhs scaled by
// exactly lambda^(alpha-1) (same difference matrix), and the scaled expansion
// is re-accumulated term by term against the scaled partial sums.
inline ResolventBoundCheck corollary_scaled_check(const ResolventPoint& point,
                                                  const Matrix& A, const Matrix& B) {
    const double scale = std::pow(point.lambda, point.alpha - 1.0);
    ResolventBoundCheck check = lemma_bound_check(point, A, B);
    check.lhs *= scale;
    check.rhs *= scale;

    const auto [value, report] = neumann_resolvent(point, A, B);
    const Matrix R = resolvent(point, A);
    const Matrix BR = B * R;
    Matrix scaled_term = R * scale;
    Matrix scaled_sum = scaled_term;
    for (int n = 0; n < report.n_terms; ++n) {
        if (n > 0) {
            scaled_term = scaled_term * BR;
            scaled_sum += scaled_term;
        }
        Matrix reference = report.partial_sums[n];
        reference *= scale;
        check.term_consistency =
            std::max(check.term_consistency, (scaled_sum - reference).inf_norm());
    }
    return check;
}

}  // namespace fraccos
