#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbci {

/// CI coefficient vector. Plain contiguous doubles; all kernels are exact
/// linear maps so cached operator images stay consistent under recombination.
using Vector = std::vector<double>;

namespace detail {
inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

inline void check_same_size(const Vector& x, const Vector& y, const char* where) {
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
}

inline double dot(const Vector& x, const Vector& y) {
    check_same_size(x, y, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm(const Vector& x) { return std::sqrt(dot(x, x)); }

/// y += a*x
inline void axpy(double a, const Vector& x, Vector& y) {
    check_same_size(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(Vector& x, double a) {
    for (double& v : x) v *= a;
}

inline Vector scaled(const Vector& x, double a) {
    Vector r = x;
    scale(r, a);
    return r;
}

/// a*u + b*v as a new vector.
inline Vector combine(double a, const Vector& u, double b, const Vector& v) {
    check_same_size(u, v, "combine");
    Vector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = a * u[i] + b * v[i];
    return r;
}

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

inline Vector unit_vector(std::size_t n, std::size_t i) {
    Vector r(n, 0.0);
    r.at(i) = 1.0;
    return r;
}

inline bool all_finite(const Vector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Normalizes in place; returns the original norm (0 if x was zero).
inline double normalize(Vector& x) {
    const double n = norm(x);
    if (n > 0.0) scale(x, 1.0 / n);
    return n;
}

}  // namespace sbci
