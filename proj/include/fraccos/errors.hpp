#pragma once

#include <stdexcept>
#include <string>

namespace fraccos {

// A linear system whose pivot collapsed, or a resolvent point that sits on
// the spectrum.
struct singular_matrix : std::runtime_error {
    explicit singular_matrix(const std::string& what) : std::runtime_error(what) {}
};

// A stated smallness hypothesis does not hold for the given data, e.g. a
// perturbation whose resolvent product has norm >= 1.  Callers must treat
// this as "theorem not applicable", never as a numerical fallback.
struct hypothesis_violation : std::runtime_error {
    explicit hypothesis_violation(const std::string& what) : std::runtime_error(what) {}
};

// An iteration hit its cap or a refinement loop stalled before reaching the
// requested tolerance.
struct nonconvergence : std::runtime_error {
    explicit nonconvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fraccos
