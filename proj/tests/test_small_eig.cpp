#include <doctest.h>

#include <random>

#include "sbci/small_eig.hpp"
#include "support/dense_oracle.hpp"

using namespace sbci;

namespace {

SmallMatrix random_symmetric(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    SmallMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
    return m;
}

// det(V - lambda I) via Gaussian elimination with partial pivoting; the
// characteristic-polynomial residual check for computed eigenvalues.
double char_poly(const SmallMatrix& v, double lambda) {
    const int n = v.n;
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = v(i, j) - (i == j ? lambda : 0.0);
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace

TEST_CASE("diagonal input sorts ascending") {
    SmallMatrix m(3);
    m(0, 0) = 3;
    m(1, 1) = 1;
    m(2, 2) = 2;
    const auto r = small_symmetric_eig(m);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("2x2 exchange matrix") {
    SmallMatrix m(2);
    m(0, 1) = m(1, 0) = 1.0;
    const auto r = small_symmetric_eig(m);
    CHECK(r.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("contract checks") {
    SmallMatrix m(7);
    CHECK_THROWS_AS(small_symmetric_eig(m), std::invalid_argument);
    SmallMatrix bad(2);
    bad(0, 1) = 1.0;
    bad(1, 0) = 2.0;
    CHECK_THROWS_AS(small_symmetric_eig(bad), std::invalid_argument);
}

TEST_CASE("random 6x6: residuals, orthonormality, char poly, oracle") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        const SmallMatrix m = random_symmetric(6, rng);
        const auto r = small_symmetric_eig(m);
        double scale = 0.0;
        for (double v : m.a) scale = std::max(scale, std::abs(v));

        for (int k = 0; k < 6; ++k) {
            // residual ||V v - lambda v||
            double rn = 0.0;
            for (int i = 0; i < 6; ++i) {
                double s = 0.0;
                for (int j = 0; j < 6; ++j) s += m(i, j) * r.eigenvectors(j, k);
                s -= r.eigenvalues[k] * r.eigenvectors(i, k);
                rn += s * s;
            }
            CHECK(std::sqrt(rn) <= 1e-12 * std::max(scale, 1.0));
            if (k > 0) CHECK(r.eigenvalues[k] >= r.eigenvalues[k - 1]);
            // characteristic polynomial vanishes at the eigenvalue
            const double p = char_poly(m, r.eigenvalues[k]);
            CHECK(std::abs(p) <= 1e-9 * std::pow(std::max(scale, 1.0), 6));
        }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                double s = 0.0;
                for (int i = 0; i < 6; ++i) s += r.eigenvectors(i, a) * r.eigenvectors(i, b);
                CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) <= 1e-12);
            }

        // cross-check eigenvalues against the Eigen oracle
        oracle::Matrix em(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) em(i, j) = m(i, j);
        const auto es = oracle::eigensystem(em);
        for (int k = 0; k < 6; ++k)
            CHECK(std::abs(r.eigenvalues[k] - es.values[k]) <= 1e-12 * std::max(scale, 1.0));
    }
}
