// Shared helpers for the test binaries.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraccos/fraccos.hpp"

namespace testutil {

inline double max_entry_diff(const fraccos::Matrix& a, const fraccos::Matrix& b) {
    return (a - b).max_abs();
}

// Random symmetric matrix with the requested spectral radius, built through
// the same path the CLI uses so instances stay reproducible across suites.
inline fraccos::Matrix random_symmetric(std::size_t dim, double spectral_radius,
                                        std::uint64_t seed) {
    nlohmann::json j = {{"builder", "random_symmetric"},
                        {"dim", dim},
                        {"spectral_radius", spectral_radius}};
    std::mt19937_64 rng(seed);
    return fraccos::build_matrix(j, rng);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

inline fraccos::Matrix scalar(double v) {
    fraccos::Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

inline fraccos::Matrix diagonal(const std::vector<double>& entries) {
    fraccos::Matrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

}  // namespace testutil
