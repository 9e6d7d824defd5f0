#pragma once

// Laplace-side verification.  Every family here has a closed transform in
// terms of the fractional resolvent:
//
//   L[C_alpha(.;A)](lambda) = lambda^(alpha-1) R(lambda^alpha; A)
//   L[S_alpha(.;A)](lambda) = lambda^(alpha-2) R(lambda^alpha; A)
//   L[T_alpha(.;A)](lambda) = R(lambda^alpha; A)
//
// and the series terms obey, with R = R(lambda^alpha; A),
//
//   L[S_n] = R B L[S_{n-1}] = lambda^(alpha-2) R (B R)^n
//   L[X_n] = lambda^(alpha-1) R B L[S_{n-1}]
//
// while the summed chains transform to the perturbed resolvent.  Transforms
// are computed by quadrature on [0, T_max]; the discarded [T_max, inf) part
// is certified by closed-form tail bounds from the exponential envelope
// M e^(omega t) t^(sigma-1) / Gamma(sigma) of each integrand, so a reported
// residual is meaningful only when its tail bound is below the tolerance the
// caller wants to assert.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fraccos/errors.hpp"
#include "fraccos/matrix.hpp"
#include "fraccos/operator_families.hpp"
#include "fraccos/perturbation_series.hpp"
#include "fraccos/quadrature.hpp"
#include "fraccos/resolvent.hpp"
#include "fraccos/special_functions.hpp"

namespace fraccos {

struct LaplaceQuadrature {
    double T_max = 20.0;
    int panels = 40;
    int nodes_per_panel = 12;
    int sub_nodes = 24;  // substituted rule on the first panel
    void validate() const {
        if (!(T_max > 0.0) || panels < 2 || nodes_per_panel < 2 || sub_nodes < 4)
            throw std::invalid_argument("LaplaceQuadrature: bad configuration");
    }
};

struct TransformCheckRow {
    std::string check;
    double lambda = 0.0;
    int term_index = -1;  // -1 for whole-family checks
    double residual = 0.0;
    double tail_bound = 0.0;
};

namespace detail {

// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s),
// series below s + 1 and a Lentz continued fraction above.
inline double regularized_gamma_q(double s, double x) {
    if (!(s > 0.0) || x < 0.0)
        throw std::invalid_argument("regularized_gamma_q: need s > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) {
        double ap = s;
        double sum = 1.0 / s;
        double del = sum;
        for (int k = 0; k < 500; ++k) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + s * std::log(x) - log_gamma(s));
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
}

// integral_T^inf e^(-lambda t) * prefactor e^(omega t) t^(sigma-1)/Gamma(sigma) dt.
// Infinite when lambda <= omega: the envelope then certifies nothing.
inline double envelope_tail(double prefactor, double omega, double sigma, double lambda,
                            double T) {
    const double mu = lambda - omega;
    if (!(mu > 0.0)) return std::numeric_limits<double>::infinity();
    return prefactor * std::pow(mu, -sigma) * regularized_gamma_q(sigma, mu * T);
}

// Sampled integrand reused across lambda values.  Panels past the first use
// the mesh rule directly; the first panel is integrated under t = h u^4,
// which flattens the t^alpha-type behaviour of the families at zero, and is
// sampled by exact evaluation rather than interpolation.
struct TransformTable {
    std::shared_ptr<const PanelMesh> mesh;
    std::size_t dim = 0;
    std::vector<Matrix> node_values;
    std::vector<double> sub_t, sub_w;
    std::vector<Matrix> sub_values;

    Matrix transform(double lambda) const {
        Matrix acc(dim, dim);
        const int n = mesh->nodes_per_panel();
        for (int p = 1; p < mesh->panels(); ++p)
            for (int k = 0; k < n; ++k) {
                const std::size_t idx = static_cast<std::size_t>(p) * n + k;
                Matrix term = node_values[idx];
                term *= mesh->node_weight(k) * std::exp(-lambda * mesh->node_time(p, k));
                acc += term;
            }
        for (std::size_t i = 0; i < sub_t.size(); ++i) {
            Matrix term = sub_values[i];
            term *= sub_w[i] * std::exp(-lambda * sub_t[i]);
            acc += term;
        }
        return acc;
    }
};

inline TransformTable make_transform_table(std::shared_ptr<const PanelMesh> mesh,
                                           const std::vector<Matrix>& node_values,
                                           const MatrixFn& first_panel_exact,
                                           int sub_nodes) {
    TransformTable table;
    table.mesh = std::move(mesh);
    table.dim = node_values.front().rows();
    table.node_values = node_values;
    const double h = table.mesh->boundary(1);
    const GaussRule& rule = gauss_rule(sub_nodes);
    for (int i = 0; i < sub_nodes; ++i) {
        const double u = 0.5 * (rule.nodes[i] + 1.0);
        const double t = h * u * u * u * u;
        table.sub_t.push_back(t);
        table.sub_w.push_back(0.5 * rule.weights[i] * 4.0 * h * u * u * u);
        table.sub_values.push_back(first_panel_exact(t));
    }
    return table;
}

inline TransformTable make_transform_table(std::shared_ptr<const PanelMesh> mesh,
                                           const MatrixFn& exact, int sub_nodes) {
    std::vector<Matrix> node_values;
    node_values.reserve(mesh->node_count());
    for (double t : mesh->node_times()) node_values.push_back(exact(t));
    return make_transform_table(std::move(mesh), node_values, exact, sub_nodes);
}

}  // namespace detail

// Transform of one unperturbed family at a single point, by quadrature.
inline Matrix laplace_of_family(FamilyKind kind, double alpha, const Matrix& A,
                                double lambda, const LaplaceQuadrature& lq) {
    FractionalOrder order(alpha);
    lq.validate();
    auto mesh = std::make_shared<PanelMesh>(lq.T_max, lq.panels, lq.nodes_per_panel);
    const MatrixFn f = [&, alpha](double t) {
        switch (kind) {
            case FamilyKind::cosine: return cosine_matrix(alpha, t, A);
            case FamilyKind::sine: return sine_matrix(alpha, t, A);
            case FamilyKind::riemann_liouville: return rl_matrix(alpha, t, A);
        }
        throw std::logic_error("laplace_of_family: bad kind");
    };
    return detail::make_transform_table(std::move(mesh), f, lq.sub_nodes).transform(lambda);
}

// Residuals of the three family transform identities against the resolvent,
// one row per (identity, lambda).
inline std::vector<TransformCheckRow> check_transform_relations(
    double alpha, const Matrix& A, const std::vector<double>& lambdas,
    const LaplaceQuadrature& lq) {
    FractionalOrder order(alpha);
    lq.validate();
    auto mesh = std::make_shared<PanelMesh>(lq.T_max, lq.panels, lq.nodes_per_panel);
    const ExponentialBound env = estimate_exponential_bound(alpha, A, mesh->node_times());

    const detail::TransformTable cos_table = detail::make_transform_table(
        mesh, [&](double t) { return cosine_matrix(alpha, t, A); }, lq.sub_nodes);
    const detail::TransformTable sin_table = detail::make_transform_table(
        mesh, [&](double t) { return sine_matrix(alpha, t, A); }, lq.sub_nodes);
    const detail::TransformTable rl_table = detail::make_transform_table(
        mesh, [&](double t) { return rl_matrix(alpha, t, A); }, lq.sub_nodes);

    std::vector<TransformCheckRow> rows;
    for (double lambda : lambdas) {
        const Matrix R = resolvent(ResolventPoint{lambda, alpha}, A);
        Matrix rhs = R;
        rhs *= std::pow(lambda, alpha - 1.0);
        rows.push_back({"laplace.cosine_transform", lambda, -1,
                        (cos_table.transform(lambda) - rhs).inf_norm(),
                        detail::envelope_tail(env.M, env.omega, 1.0, lambda, lq.T_max)});
        rhs = R;
        rhs *= std::pow(lambda, alpha - 2.0);
        rows.push_back({"laplace.sine_transform", lambda, -1,
                        (sin_table.transform(lambda) - rhs).inf_norm(),
                        detail::envelope_tail(env.M, env.omega, 2.0, lambda, lq.T_max)});
        rows.push_back(
            {"laplace.riemann_liouville_transform", lambda, -1,
             (rl_table.transform(lambda) - R).inf_norm(),
             detail::envelope_tail(env.M, env.omega, alpha, lambda, lq.T_max)});
    }
    return rows;
}

// Per-term transform identities: the sine recursion, the cross-term
// recursion, and the closed form of the sine term, for n = 1..n_max.
inline std::vector<TransformCheckRow> check_term_recursion_transform(
    double alpha, const Matrix& A, const Matrix& B, int n_max,
    const std::vector<double>& lambdas, const LaplaceQuadrature& lq) {
    FractionalOrder order(alpha);
    lq.validate();
    if (n_max < 1) throw std::invalid_argument("check_term_recursion_transform: n_max >= 1");
    const std::size_t d = A.rows();
    const double b = B.inf_norm();

    QuadratureConfig quad;
    quad.panels = lq.panels;
    quad.nodes_per_panel = lq.nodes_per_panel;
    const std::vector<double> no_targets;
    detail::ChainLevel chain = detail::build_chain_level(TermKind::sine_term, alpha, A, B,
                                                         lq.T_max, no_targets, n_max, quad);
    const PanelMesh& mesh = *chain.mesh;
    const ExponentialBound env = estimate_exponential_bound(alpha, A, mesh.node_times());

    ConvolutionEngine rl_engine(
        &mesh, [&](double x) { return rl_matrix(alpha, x, A); }, alpha - 1.0, d,
        lq.sub_nodes);
    ConvolutionEngine cross_engine(
        &mesh, [&](double x) { return cosine_matrix(alpha, x, A); }, 0.0, d, lq.sub_nodes);

    // Tables for S_n and X_n.  First-panel samples come from the engines so
    // that no interpolation enters the substituted rule.
    std::vector<detail::TransformTable> table_S, table_X;
    for (int n = 0; n <= n_max; ++n) {
        if (n == 0) {
            table_S.push_back(detail::make_transform_table(
                chain.mesh, [&](double t) { return sine_matrix(alpha, t, A); },
                lq.sub_nodes));
            continue;
        }
        const MeshFunction& prev = chain.terms[n - 1].values;
        std::vector<Matrix> feed_vals;
        feed_vals.reserve(mesh.node_count());
        for (std::size_t idx = 0; idx < mesh.node_count(); ++idx)
            feed_vals.push_back(B * prev.at_node(idx));
        const MeshFunction feed(chain.mesh.get(), std::move(feed_vals));
        table_S.push_back(detail::make_transform_table(
            chain.mesh, chain.terms[n].values.values(),
            [&](double t) { return rl_engine.eval(t, feed); }, lq.sub_nodes));

        std::vector<Matrix> x_values;
        x_values.reserve(mesh.node_count());
        for (int p = 0; p < mesh.panels(); ++p)
            for (int k = 0; k < mesh.nodes_per_panel(); ++k)
                x_values.push_back(cross_engine.eval_at_node(p, k, feed));
        table_X.push_back(detail::make_transform_table(
            chain.mesh, x_values, [&](double t) { return cross_engine.eval(t, feed); },
            lq.sub_nodes));
    }

    std::vector<TransformCheckRow> rows;
    for (double lambda : lambdas) {
        const Matrix R = resolvent(ResolventPoint{lambda, alpha}, A);
        const double R_norm = R.inf_norm();
        std::vector<Matrix> LS;
        for (int n = 0; n <= n_max; ++n) LS.push_back(table_S[n].transform(lambda));

        // Envelope tails of S_n and X_n.
        const auto tail_S = [&](int n) {
            return detail::envelope_tail(std::pow(env.M, n + 1) * std::pow(b, n), env.omega,
                                         n * alpha + 2.0, lambda, lq.T_max);
        };
        const auto tail_X = [&](int n) {
            return detail::envelope_tail(std::pow(env.M, n + 1) * std::pow(b, n), env.omega,
                                         (n - 1) * alpha + 3.0, lambda, lq.T_max);
        };

        Matrix BRpow = Matrix::identity(d);
        for (int n = 1; n <= n_max; ++n) {
            const Matrix feed_transform = R * (B * LS[n - 1]);
            rows.push_back({"laplace.sine_term_recursion", lambda, n,
                            (LS[n] - feed_transform).inf_norm(),
                            tail_S(n) + R_norm * b * tail_S(n - 1)});

            Matrix cross_rhs = feed_transform;
            cross_rhs *= std::pow(lambda, alpha - 1.0);
            rows.push_back({"laplace.cosine_term_recursion", lambda, n,
                            (table_X[n - 1].transform(lambda) - cross_rhs).inf_norm(),
                            tail_X(n) + std::pow(lambda, alpha - 1.0) * R_norm * b *
                                            tail_S(n - 1)});

            BRpow = BRpow * (B * R);
            Matrix closed = R * BRpow;
            closed *= std::pow(lambda, alpha - 2.0);
            rows.push_back({"laplace.sine_term_closed_form", lambda, n,
                            (LS[n] - closed).inf_norm(), tail_S(n)});
        }
    }
    return rows;
}

// Transforms of the summed perturbed families against the perturbed
// resolvent.  The reported tail combines the envelope of the perturbed
// family past T_max with the series truncation tail integrated over
// [0, T_max].
inline std::vector<TransformCheckRow> check_perturbed_transforms(
    double alpha, const Matrix& A, const Matrix& B, double series_tol,
    const std::vector<double>& lambdas, const LaplaceQuadrature& lq, int term_cap = 64) {
    FractionalOrder order(alpha);
    lq.validate();
    const std::size_t d = A.rows();
    const double b = B.inf_norm();

    QuadratureConfig quad;
    quad.panels = lq.panels;
    quad.nodes_per_panel = lq.nodes_per_panel;
    PanelMesh probe(lq.T_max, quad.panels, quad.nodes_per_panel);
    const ExponentialBound env = estimate_exponential_bound(alpha, A, probe.node_times());
    const Matrix AB = A + B;
    const ExponentialBound env_pert =
        estimate_exponential_bound(alpha, AB, probe.node_times());

    const std::vector<double> no_targets;
    std::vector<detail::TransformTable> tables;   // cosine then sine
    std::vector<double> series_tails;
    for (TermKind kind : {TermKind::cosine_chain, TermKind::sine_term}) {
        const int N = detail::truncation_index(env, b, alpha, kind, lq.T_max, series_tol,
                                               term_cap);
        detail::ChainLevel chain =
            detail::build_chain_level(kind, alpha, A, B, lq.T_max, no_targets, N, quad);
        const PanelMesh& mesh = *chain.mesh;
        ConvolutionEngine engine(
            &mesh, [&](double x) { return rl_matrix(alpha, x, A); }, alpha - 1.0, d,
            lq.sub_nodes);

        std::vector<Matrix> sums(mesh.node_count(), Matrix(d, d));
        for (int n = 0; n <= N; ++n)
            for (std::size_t g = 0; g < mesh.node_count(); ++g)
                sums[g] += chain.terms[n].values.at_node(g);
        const MatrixFn first_panel = [&, kind, N](double t) {
            Matrix value = kind == TermKind::sine_term ? sine_matrix(alpha, t, A)
                                                       : cosine_matrix(alpha, t, A);
            for (int n = 1; n <= N; ++n) {
                const MeshFunction& prev = chain.terms[n - 1].values;
                const MatrixFn feed = [&B, &prev](double s) { return B * prev.eval(s); };
                if (t > 0.0) value += engine.eval(t, feed);
            }
            return value;
        };
        tables.push_back(
            detail::make_transform_table(chain.mesh, sums, first_panel, lq.sub_nodes));
        double tail = 0.0;
        for (int n = N + 1; n <= N + 40; ++n)
            tail += detail::term_majorant(env, b, alpha, kind, n, lq.T_max);
        series_tails.push_back(tail);
    }

    std::vector<TransformCheckRow> rows;
    for (double lambda : lambdas) {
        const Matrix R_pert = resolvent(ResolventPoint{lambda, alpha}, AB);
        Matrix rhs = R_pert;
        rhs *= std::pow(lambda, alpha - 1.0);
        rows.push_back(
            {"laplace.perturbed_cosine_transform", lambda, -1,
             (tables[0].transform(lambda) - rhs).inf_norm(),
             detail::envelope_tail(env_pert.M, env_pert.omega, 1.0, lambda, lq.T_max) +
                 series_tails[0] / lambda});
        rhs = R_pert;
        rhs *= std::pow(lambda, alpha - 2.0);
        rows.push_back(
            {"laplace.perturbed_sine_transform", lambda, -1,
             (tables[1].transform(lambda) - rhs).inf_norm(),
             detail::envelope_tail(env_pert.M, env_pert.omega, 2.0, lambda, lq.T_max) +
                 series_tails[1] / lambda});
    }
    return rows;
}

}  // namespace fraccos
