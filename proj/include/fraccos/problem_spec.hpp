#pragma once

// Problem definitions read from a JSON file.  Matrices are given either as
// row lists or through named builders, so PDE-flavored runs need no
// hand-typed entries:
//
//   {"builder": "laplacian1d", "dim": 4, "scale": 1.0}      scaled tridiagonal
//   {"builder": "diagonal", "entries": [-1.0, -4.0]}
//   {"builder": "random_symmetric", "dim": 3, "spectral_radius": 0.3}
//
// The random builder draws from a seeded generator owned by the caller, so a
// fixed (spec, seed) pair always yields the same matrices.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraccos/matrix.hpp"
#include "fraccos/quadrature.hpp"
#include "fraccos/laplace.hpp"
#include "fraccos/special_functions.hpp"

namespace fraccos {

struct TimeGrid {
    double start = 0.0;
    double stop = 1.0;
    int steps = 9;  // number of intervals; the grid has steps + 1 points

    std::vector<double> points() const {
        std::vector<double> out;
        out.reserve(steps + 1);
        for (int i = 0; i <= steps; ++i)
            out.push_back(start + (stop - start) * i / steps);
        return out;
    }
};

struct ProblemSpec {
    double alpha = 1.5;
    Matrix A;
    Matrix B;
    TimeGrid t_grid;
    double tol = 1e-8;
    QuadratureConfig quad;
    LaplaceQuadrature laplace;
    std::vector<double> lambda_list;  // empty: chosen from the growth envelope
    std::uint64_t seed = 1;
    Vec v0, v1;  // empty: zero vectors
    int term_cap = 64;
};

namespace detail {

// Uniform double in [-1, 1) from the raw engine output; the distribution
// classes in <random> are implementation-defined, this is not.
inline double symmetric_uniform(std::mt19937_64& rng) {
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace detail

inline Matrix build_matrix(const nlohmann::json& j, std::mt19937_64& rng) {
    if (j.is_array()) {
        const std::size_t rows = j.size();
        if (rows == 0) throw std::invalid_argument("matrix literal: no rows");
        const std::size_t cols = j.at(0).size();
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            if (j.at(i).size() != cols)
                throw std::invalid_argument("matrix literal: ragged rows");
            for (std::size_t k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
        }
        return m;
    }
    if (!j.is_object() || !j.contains("builder"))
        throw std::invalid_argument("matrix: expected row list or builder object");
    const std::string kind = j.at("builder").get<std::string>();
    if (kind == "laplacian1d") {
        const int dim = j.at("dim").get<int>();
        const double scale = j.value("scale", 1.0);
        if (dim < 1) throw std::invalid_argument("laplacian1d: dim must be >= 1");
        Matrix m(dim, dim);
        for (int i = 0; i < dim; ++i) {
            m(i, i) = -2.0 * scale;
            if (i > 0) m(i, i - 1) = scale;
            if (i + 1 < dim) m(i, i + 1) = scale;
        }
        return m;
    }
    if (kind == "diagonal") {
        const auto& entries = j.at("entries");
        if (!entries.is_array() || entries.empty())
            throw std::invalid_argument("diagonal: entries must be a nonempty array");
        Matrix m(entries.size(), entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries.at(i).get<double>();
        return m;
    }
    if (kind == "random_symmetric") {
        const int dim = j.at("dim").get<int>();
        const double radius = j.at("spectral_radius").get<double>();
        if (dim < 1) throw std::invalid_argument("random_symmetric: dim must be >= 1");
        if (!(radius >= 0.0))
            throw std::invalid_argument("random_symmetric: spectral_radius must be >= 0");
        Matrix m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int k = i; k < dim; ++k) {
                const double v = detail::symmetric_uniform(rng);
                m(i, k) = v;
                m(k, i) = v;
            }
        const SymmetricEigen eig = symmetric_eigen(m);
        double rho = 0.0;
        for (double mu : eig.values) rho = std::max(rho, std::fabs(mu));
        if (rho > 0.0) m *= radius / rho;
        return m;
    }
    throw std::invalid_argument("matrix builder: unknown kind '" + kind + "'");
}

inline ProblemSpec parse_problem_spec(const nlohmann::json& j) {
    ProblemSpec spec;
    try {
        spec.alpha = j.at("alpha").get<double>();
        FractionalOrder order(spec.alpha);

        spec.seed = j.value("seed", std::uint64_t{1});
        std::mt19937_64 rng(spec.seed);
        spec.A = build_matrix(j.at("A"), rng);
        if (j.contains("B"))
            spec.B = build_matrix(j.at("B"), rng);
        else
            spec.B = Matrix(spec.A.rows(), spec.A.cols());

        if (!spec.A.square() || spec.A.rows() != spec.B.rows() ||
            spec.A.cols() != spec.B.cols())
            throw std::invalid_argument("A and B must be square with matching shape");

        if (j.contains("t_grid")) {
            const auto& tg = j.at("t_grid");
            spec.t_grid.start = tg.value("start", 0.0);
            spec.t_grid.stop = tg.at("stop").get<double>();
            spec.t_grid.steps = tg.value("steps", 9);
        }
        if (!(spec.t_grid.start >= 0.0) || !(spec.t_grid.stop > spec.t_grid.start) ||
            spec.t_grid.steps < 1)
            throw std::invalid_argument("t_grid must satisfy 0 <= start < stop, steps >= 1");

        spec.tol = j.value("tol", 1e-8);
        if (!(spec.tol > 0.0)) throw std::invalid_argument("tol must be positive");

        if (j.contains("quad")) {
            const auto& q = j.at("quad");
            spec.quad.panels = q.value("panels", spec.quad.panels);
            spec.quad.nodes_per_panel = q.value("nodes_per_panel", spec.quad.nodes_per_panel);
            spec.quad.refinement_factor =
                q.value("refinement_factor", spec.quad.refinement_factor);
            spec.quad.target_tol = q.value("target_tol", spec.quad.target_tol);
        }
        spec.quad.validate();

        if (j.contains("laplace")) {
            const auto& lq = j.at("laplace");
            spec.laplace.T_max = lq.value("T_max", spec.laplace.T_max);
            spec.laplace.panels = lq.value("panels", spec.laplace.panels);
            spec.laplace.nodes_per_panel =
                lq.value("nodes_per_panel", spec.laplace.nodes_per_panel);
            spec.laplace.sub_nodes = lq.value("sub_nodes", spec.laplace.sub_nodes);
        }
        spec.laplace.validate();

        if (j.contains("lambda_list")) {
            for (const auto& v : j.at("lambda_list"))
                spec.lambda_list.push_back(v.get<double>());
            for (double lambda : spec.lambda_list)
                if (!(lambda > 0.0))
                    throw std::invalid_argument("lambda_list entries must be positive");
        }

        if (j.contains("v0"))
            for (const auto& v : j.at("v0")) spec.v0.push_back(v.get<double>());
        if (j.contains("v1"))
            for (const auto& v : j.at("v1")) spec.v1.push_back(v.get<double>());
        if (spec.v0.empty()) spec.v0.assign(spec.A.rows(), 0.0);
        if (spec.v1.empty()) spec.v1.assign(spec.A.rows(), 0.0);
        if (spec.v0.size() != spec.A.rows() || spec.v1.size() != spec.A.rows())
            throw std::invalid_argument("v0/v1 length must match the matrix dimension");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("problem spec: ") + e.what());
    }
    return spec;
}

}  // namespace fraccos
