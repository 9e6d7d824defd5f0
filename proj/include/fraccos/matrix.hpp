#pragma once

// Small dense real matrices.  Everything in this library works on systems of
// a handful of states, so the representation is a flat row-major buffer and
// the algorithms are the textbook ones without blocking or pivot scaling
// tricks beyond partial pivoting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "fraccos/errors.hpp"

namespace fraccos {

using Vec = std::vector<double>;

class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    Matrix(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw std::invalid_argument("Matrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    Matrix& operator+=(const Matrix& rhs) {
        check_same_shape(rhs);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
        return *this;
    }

    Matrix& operator-=(const Matrix& rhs) {
        check_same_shape(rhs);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    // this += (a b) s without temporaries; the hot path of the convolution
    // sums.
    Matrix& add_scaled_product(const Matrix& a, const Matrix& b, double s) {
        if (a.cols_ != b.rows_ || rows_ != a.rows_ || cols_ != b.cols_)
            throw std::invalid_argument("Matrix: product shape mismatch");
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k) * s;
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    data_[i * cols_ + j] += aik * b(k, j);
            }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("Matrix: product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    friend Vec operator*(const Matrix& a, const Vec& x) {
        if (a.cols_ != x.size())
            throw std::invalid_argument("Matrix: matvec shape mismatch");
        Vec y(a.rows_, 0.0);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j)
                y[i] += a(i, j) * x[j];
        return y;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    // Max row sum.  This is the operator norm used throughout the library.
    double inf_norm() const {
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double best = 0.0;
        for (double v : data_) best = std::max(best, std::fabs(v));
        return best;
    }

    bool is_symmetric(double tol = 1e-12) const {
        if (!square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

private:
    void check_same_shape(const Matrix& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument("Matrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double inf_norm(const Vec& x) {
    double best = 0.0;
    for (double v : x) best = std::max(best, std::fabs(v));
    return best;
}

// LU factorization with partial pivoting, kept around so one factorization
// can serve several right-hand sides.
class LuFactors {
public:
    explicit LuFactors(const Matrix& a) : lu_(a), perm_(a.rows()) {
        if (!a.square())
            throw std::invalid_argument("LuFactors: matrix must be square");
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            double best = std::fabs(lu_(col, col));
            for (std::size_t r = col + 1; r < n; ++r) {
                const double v = std::fabs(lu_(r, col));
                if (v > best) { best = v; piv = r; }
            }
            if (best < 1e-300)
                throw singular_matrix("LuFactors: vanishing pivot");
            if (piv != col) {
                for (std::size_t j = 0; j < n; ++j)
                    std::swap(lu_(piv, j), lu_(col, j));
                std::swap(perm_[piv], perm_[col]);
            }
            for (std::size_t r = col + 1; r < n; ++r) {
                const double f = lu_(r, col) / lu_(col, col);
                lu_(r, col) = f;
                for (std::size_t j = col + 1; j < n; ++j)
                    lu_(r, j) -= f * lu_(col, j);
            }
        }
    }

    Vec solve(const Vec& b) const {
        const std::size_t n = lu_.rows();
        if (b.size() != n)
            throw std::invalid_argument("LuFactors: rhs size mismatch");
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
            y[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = y[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * y[j];
            y[i] = s / lu_(i, i);
        }
        return y;
    }

    Matrix solve(const Matrix& b) const {
        const std::size_t n = lu_.rows();
        Matrix x(n, b.cols());
        Vec col(n);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
            Vec sol = solve(col);
            for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        }
        return x;
    }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

// Inverse through LU with one pass of iterative refinement.  Throws
// singular_matrix when a pivot collapses.
inline Matrix inverse(const Matrix& a) {
    LuFactors lu(a);
    const std::size_t n = a.rows();
    Matrix inv = lu.solve(Matrix::identity(n));
    Matrix residual = Matrix::identity(n) - a * inv;
    inv += lu.solve(residual) * 1.0;
    return inv;
}

inline double condition_estimate(const Matrix& a, const Matrix& a_inv) {
    return a.inf_norm() * a_inv.inf_norm();
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, returned in
// ascending order.  Used for spectrum-based growth estimates and as an
// independent evaluation path in the tests.
struct SymmetricEigen {
    Vec values;      // ascending
    Matrix vectors;  // columns are the corresponding eigenvectors
};

inline SymmetricEigen symmetric_eigen(const Matrix& a, int max_sweeps = 64) {
    if (!a.square() || !a.is_symmetric(1e-9))
        throw std::invalid_argument("symmetric_eigen: matrix must be symmetric");
    const std::size_t n = a.rows();
    Matrix d = a;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += d(i, j) * d(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(d(p, q)) < 1e-300) continue;
                const double theta = (d(q, q) - d(p, p)) / (2.0 * d(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double dkp = d(k, p), dkq = d(k, q);
                    d(k, p) = c * dkp - s * dkq;
                    d(k, q) = s * dkp + c * dkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double dpk = d(p, k), dqk = d(q, k);
                    d(p, k) = c * dpk - s * dqk;
                    d(q, k) = s * dpk + c * dqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricEigen out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) { out.values[i] = d(i, i); order[i] = i; }
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted.values[j] = out.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
    }
    return sorted;
}

}  // namespace fraccos
