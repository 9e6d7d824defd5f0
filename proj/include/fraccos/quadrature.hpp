#pragma once

// Composite Gauss-Legendre quadrature over uniform panels, plus a Volterra
// convolution evaluator for kernels with an algebraic endpoint factor.
//
// The convolutions computed here all have the shape
//
//     (K * f)(tau) = integral_0^tau K(tau - s) f(s) ds
//
// where K(x) behaves like x^q * (power series in x^r) near x = 0 with
// q > -1.  Panels at a safe distance from the moving endpoint s = tau are
// integrated directly; the last stretch is mapped by x = u^m with
// m = 4/(q+1), which turns the endpoint factor into u^3 and makes plain
// Gauss-Legendre nodes converge at high order again.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "fraccos/errors.hpp"
#include "fraccos/matrix.hpp"
#include "fraccos/special_functions.hpp"

namespace fraccos {

struct QuadratureConfig {
    int panels = 12;
    int nodes_per_panel = 12;
    int refinement_factor = 2;
    double target_tol = 1e-9;

    void validate() const {
        if (panels < 1)
            throw std::invalid_argument("QuadratureConfig: panels must be >= 1");
        if (nodes_per_panel < 2 || nodes_per_panel > 64)
            throw std::invalid_argument("QuadratureConfig: nodes_per_panel out of range");
        if (refinement_factor < 2)
            throw std::invalid_argument("QuadratureConfig: refinement_factor must be >= 2");
        if (!(target_tol > 0.0))
            throw std::invalid_argument("QuadratureConfig: target_tol must be positive");
    }
};

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;  // sum to 2
    std::vector<double> bary;     // barycentric weights for the node set
};

// Nodes and weights by Newton iteration on the Legendre recurrence.  Rules
// are cached per order; the library runs single-threaded so plain statics
// are fine here.
inline const GaussRule& gauss_rule(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Newton above walks from the right; store ascending.
    if (n > 1 && rule.nodes.front() > rule.nodes.back()) {
        std::reverse(rule.nodes.begin(), rule.nodes.end());
        std::reverse(rule.weights.begin(), rule.weights.end());
    }
    rule.bary.assign(n, 1.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (j != k) rule.bary[k] /= (rule.nodes[k] - rule.nodes[j]);
    return cache.emplace(n, std::move(rule)).first->second;
}

// Uniform panel split of [0, T] carrying one Gauss rule per panel.
class PanelMesh {
public:
    PanelMesh(double T, int panels, int nodes_per_panel)
        : T_(T), panels_(panels), rule_(&gauss_rule(nodes_per_panel)) {
        if (!(T > 0.0))
            throw std::invalid_argument("PanelMesh: span must be positive");
        h_ = T / panels;
        times_.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
        for (int p = 0; p < panels; ++p)
            for (int k = 0; k < nodes_per_panel; ++k)
                times_.push_back(node_time(p, k));
    }

    double span() const { return T_; }
    int panels() const { return panels_; }
    int nodes_per_panel() const { return static_cast<int>(rule_->nodes.size()); }
    double panel_width() const { return h_; }
    const GaussRule& rule() const { return *rule_; }
    const std::vector<double>& node_times() const { return times_; }
    std::size_t node_count() const { return times_.size(); }

    double boundary(int p) const { return p * h_; }

    double node_time(int p, int k) const {
        return boundary(p) + 0.5 * h_ * (rule_->nodes[k] + 1.0);
    }

    double node_weight(int k) const { return 0.5 * h_ * rule_->weights[k]; }

    int panel_of(double t) const {
        int p = static_cast<int>(std::floor(t / h_));
        if (p < 0) p = 0;
        if (p >= panels_) p = panels_ - 1;
        return p;
    }

private:
    double T_;
    int panels_;
    double h_;
    const GaussRule* rule_;
    std::vector<double> times_;
};

// Matrix-valued function stored at every mesh node, evaluated elsewhere by
// barycentric interpolation within the containing panel.
class MeshFunction {
public:
    MeshFunction() = default;
    MeshFunction(const PanelMesh* mesh, std::vector<Matrix> values)
        : mesh_(mesh), values_(std::move(values)) {}

    const PanelMesh& mesh() const { return *mesh_; }
    const std::vector<Matrix>& values() const { return values_; }

    const Matrix& at_node(std::size_t global_index) const { return values_[global_index]; }

    Matrix eval(double t) const {
        const int p = mesh_->panel_of(t);
        const int n = mesh_->nodes_per_panel();
        const GaussRule& rule = mesh_->rule();
        const double xi =
            2.0 * (t - mesh_->boundary(p)) / mesh_->panel_width() - 1.0;
        const std::size_t base = static_cast<std::size_t>(p) * n;
        for (int k = 0; k < n; ++k)
            if (std::fabs(xi - rule.nodes[k]) < 1e-14) return values_[base + k];
        double denom = 0.0;
        std::vector<double> coeff(n);
        for (int k = 0; k < n; ++k) {
            coeff[k] = rule.bary[k] / (xi - rule.nodes[k]);
            denom += coeff[k];
        }
        Matrix out(values_[base].rows(), values_[base].cols());
        for (int k = 0; k < n; ++k) out += values_[base + k] * (coeff[k] / denom);
        return out;
    }

private:
    const PanelMesh* mesh_ = nullptr;
    std::vector<Matrix> values_;
};

using MatrixFn = std::function<Matrix(double)>;

// Volterra convolution against a fixed kernel over a fixed mesh.  The kernel
// is described by its evaluator and the endpoint exponent q of its algebraic
// factor at 0.  Kernel samples on far panels depend only on the panel
// distance and the node pair, so they are cached and shared across targets
// and across series terms.
class ConvolutionEngine {
public:
    ConvolutionEngine(const PanelMesh* mesh, MatrixFn kernel, double endpoint_exponent,
                      std::size_t dim, int tail_nodes = 24)
        : mesh_(mesh), kernel_(std::move(kernel)), q_(endpoint_exponent), dim_(dim),
          tail_nodes_(tail_nodes) {
        if (!(q_ > -1.0))
            throw std::invalid_argument("ConvolutionEngine: endpoint exponent must exceed -1");
    }

    const PanelMesh& mesh() const { return *mesh_; }

    // Convolution value at a mesh node, using the kernel cache.
    Matrix eval_at_node(int panel, int k, const MatrixFn& f) const {
        const double tau = mesh_->node_time(panel, k);
        return accumulate(
            tau, panel, k, [&](int j, int kk) { return f(mesh_->node_time(j, kk)); }, f);
    }

    // Same, with the integrand already sampled at the mesh nodes.  Node
    // samples come straight from the table; only the endpoint-mapped tail
    // interpolates.
    Matrix eval_at_node(int panel, int k, const MeshFunction& f) const {
        const double tau = mesh_->node_time(panel, k);
        const int n = mesh_->nodes_per_panel();
        return accumulate(
            tau, panel, k,
            [&](int j, int kk) -> const Matrix& { return f.at_node(j * n + kk); },
            [&](double s) { return f.eval(s); });
    }

    // Convolution value at an arbitrary point of [0, span].
    Matrix eval(double tau, const MatrixFn& f) const {
        if (tau <= 0.0) return Matrix(dim_, dim_);
        return accumulate(
            tau, mesh_->panel_of(tau), -1,
            [&](int j, int kk) { return f(mesh_->node_time(j, kk)); }, f);
    }

    Matrix eval(double tau, const MeshFunction& f) const {
        if (tau <= 0.0) return Matrix(dim_, dim_);
        const int n = mesh_->nodes_per_panel();
        return accumulate(
            tau, mesh_->panel_of(tau), -1,
            [&](int j, int kk) -> const Matrix& { return f.at_node(j * n + kk); },
            [&](double s) { return f.eval(s); });
    }

private:
    static constexpr int kTailPanels = 2;

    template <class NodeVal, class OffNode>
    Matrix accumulate(double tau, int panel, int node_k, NodeVal&& at_node,
                      OffNode&& off_node) const {
        const int tail_start = std::max(0, panel - kTailPanels);
        const int n = mesh_->nodes_per_panel();
        Matrix sum(dim_, dim_);
        for (int j = 0; j < tail_start; ++j) {
            for (int k = 0; k < n; ++k) {
                const Matrix& kv =
                    (node_k >= 0) ? cached_kernel(panel - j, node_k, k)
                                  : scratch_kernel(tau - mesh_->node_time(j, k));
                sum.add_scaled_product(kv, at_node(j, k), mesh_->node_weight(k));
            }
        }
        sum += tail_integral(mesh_->boundary(tail_start), tau, off_node);
        return sum;
    }

    const Matrix& cached_kernel(int dist, int i, int k) const {
        const int n = mesh_->nodes_per_panel();
        const std::size_t key =
            (static_cast<std::size_t>(dist) * n + i) * n + k;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const GaussRule& rule = mesh_->rule();
        const double x =
            mesh_->panel_width() * (dist + 0.5 * (rule.nodes[i] - rule.nodes[k]));
        return cache_.emplace(key, kernel_(x)).first->second;
    }

    // Off-node kernel samples repeat across series terms (same targets, same
    // mesh), so they are cached by abscissa.
    const Matrix& scratch_kernel(double x) const {
        auto it = scratch_cache_.find(x);
        if (it != scratch_cache_.end()) return it->second;
        return scratch_cache_.emplace(x, kernel_(x)).first->second;
    }

    // integral_a^tau K(tau - s) f(s) ds with the x = u^m endpoint map.
    template <class OffNode>
    Matrix tail_integral(double a, double tau, OffNode&& f) const {
        const double span = tau - a;
        Matrix sum(dim_, dim_);
        if (span <= 1e-300) return sum;
        const double m = 4.0 / (q_ + 1.0);
        const double U = std::pow(span, 1.0 / m);
        const GaussRule& rule = gauss_rule(tail_nodes_);
        for (int k = 0; k < tail_nodes_; ++k) {
            const double u = 0.5 * U * (rule.nodes[k] + 1.0);
            const double x = std::pow(u, m);
            const double jac = m * std::pow(u, m - 1.0) * 0.5 * U * rule.weights[k];
            sum.add_scaled_product(scratch_kernel(x), f(tau - x), jac);
        }
        return sum;
    }

    const PanelMesh* mesh_;
    MatrixFn kernel_;
    double q_;
    std::size_t dim_;
    int tail_nodes_;
    mutable std::map<std::size_t, Matrix> cache_;
    mutable std::map<double, Matrix> scratch_cache_;
};

// integral_0^tau g_a(tau - s) F(s) ds for a matrix-valued sampler F.  This is
// the fractional integral of order a, evaluated with the same machinery as
// the series convolutions (kernel exponent a - 1).
inline Matrix fractional_integral(double a, const MatrixFn& F, double tau,
                                  const QuadratureConfig& quad, std::size_t dim) {
    quad.validate();
    if (!(a > 0.0))
        throw std::domain_error("fractional_integral: order must be positive");
    if (tau <= 0.0) return Matrix(dim, dim);
    PanelMesh mesh(tau, quad.panels, quad.nodes_per_panel);
    ConvolutionEngine engine(
        &mesh,
        [a, dim](double x) {
            Matrix k = Matrix::identity(dim);
            return k *= g_kernel(a, x);
        },
        a - 1.0, dim);
    return engine.eval(tau, F);
}

// Scalar convolution (g_a * g_b)(t) with both endpoint singularities mapped
// away (s = v^{4/b} on the left half, tau - s = u^{4/a} on the right half).
// Used to verify the kernel semigroup property against g_{a+b}.
inline double convolve_power_kernels(double a, double b, double t, int nodes = 32) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("convolve_power_kernels: orders must be positive");
    if (t <= 0.0) return 0.0;
    const GaussRule& rule = gauss_rule(nodes);
    const double half = 0.5 * t;
    double sum = 0.0;
    {
        const double m = 4.0 / b;
        const double U = std::pow(half, 1.0 / m);
        for (int k = 0; k < nodes; ++k) {
            const double v = 0.5 * U * (rule.nodes[k] + 1.0);
            const double s = std::pow(v, m);
            const double jac = m * std::pow(v, m - 1.0) * 0.5 * U * rule.weights[k];
            sum += g_kernel(a, t - s) * g_kernel(b, s) * jac;
        }
    }
    {
        const double m = 4.0 / a;
        const double U = std::pow(half, 1.0 / m);
        for (int k = 0; k < nodes; ++k) {
            const double u = 0.5 * U * (rule.nodes[k] + 1.0);
            const double x = std::pow(u, m);
            const double jac = m * std::pow(u, m - 1.0) * 0.5 * U * rule.weights[k];
            sum += g_kernel(a, x) * g_kernel(b, t - x) * jac;
        }
    }
    return sum;
}

}  // namespace fraccos
