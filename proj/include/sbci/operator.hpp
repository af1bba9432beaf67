#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "sbci/small_eig.hpp"
#include "sbci/vector_ops.hpp"

namespace sbci {

/**
 * Matrix-free handle to a symmetric operator: dimension, application,
 * diagonal, and an application counter. Every apply() bumps the counter by
 * exactly one; the counter is atomic so concurrent applies stay exact.
 */
class SymmetricOperator {
public:
    virtual ~SymmetricOperator() = default;

    std::size_t dim() const { return dim_; }

    Vector apply(const Vector& x) const {
        if (x.size() != dim_) throw std::invalid_argument("SymmetricOperator::apply: dimension mismatch");
        Vector y(dim_, 0.0);
        apply_impl(x, y);
        applies_.fetch_add(1, std::memory_order_relaxed);
        return y;
    }

    /// Diagonal of the operator (the D of the preconditioner).
    const Vector& diagonal() const { return diag_; }

    std::uint64_t apply_count() const { return applies_.load(std::memory_order_relaxed); }
    void reset_apply_count() const { applies_.store(0, std::memory_order_relaxed); }

protected:
    explicit SymmetricOperator(std::size_t n) : dim_(n), diag_(n, 0.0) {}
    virtual void apply_impl(const Vector& x, Vector& y) const = 0;

    std::size_t dim_;
    Vector diag_;

private:
    mutable std::atomic<std::uint64_t> applies_{0};
};

/// Dense symmetric backend, mostly for small fixtures and tests.
class DenseOperator final : public SymmetricOperator {
public:
    explicit DenseOperator(SmallMatrix m) : SymmetricOperator(static_cast<std::size_t>(m.n)), m_(std::move(m)) {
        for (int i = 0; i < m_.n; ++i) diag_[static_cast<std::size_t>(i)] = m_(i, i);
    }

    const SmallMatrix& matrix() const { return m_; }

private:
    void apply_impl(const Vector& x, Vector& y) const override {
        const int n = m_.n;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += m_(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
    }

    SmallMatrix m_;
};

/**
 * Sparse symmetric backend. Stores the upper triangle (i <= j) once and
 * mirrors during application.
 */
class SparseOperator final : public SymmetricOperator {
public:
    struct Entry {
        std::size_t row, col;  // row <= col
        double value;
    };

    SparseOperator(std::size_t n, std::vector<Entry> entries)
        : SymmetricOperator(n), entries_(std::move(entries)) {
        for (auto& e : entries_) {
            if (e.row > e.col) std::swap(e.row, e.col);
            if (e.col >= n) throw std::invalid_argument("SparseOperator: index out of range");
            if (e.row == e.col) diag_[e.row] += e.value;
        }
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }

private:
    void apply_impl(const Vector& x, Vector& y) const override {
        for (const auto& e : entries_) {
            y[e.row] += e.value * x[e.col];
            if (e.row != e.col) y[e.col] += e.value * x[e.row];
        }
    }

    std::vector<Entry> entries_;
};

/// Rayleigh quotient x^T H x / x^T x given the cached image hx = H x.
inline double rayleigh_quotient(const Vector& x, const Vector& hx) {
    const double xx = dot(x, x);
    if (xx == 0.0) throw std::invalid_argument("rayleigh_quotient: zero vector");
    return dot(x, hx) / xx;
}

/// Residual z' = (H - E I) x / (x^T x) with E the Rayleigh quotient;
/// vanishes exactly at eigenvectors and equals half the gradient of E(x).
inline Vector rayleigh_residual(const Vector& x, const Vector& hx, double* energy_out = nullptr) {
    const double xx = dot(x, x);
    if (xx == 0.0) throw std::invalid_argument("rayleigh_residual: zero vector");
    const double e = dot(x, hx) / xx;
    if (energy_out) *energy_out = e;
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (hx[i] - e * x[i]) / xx;
    return z;
}

}  // namespace sbci
