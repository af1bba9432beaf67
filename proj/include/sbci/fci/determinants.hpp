#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sbci::fci {

/// Occupation bitmask over spatial orbitals, one per spin channel.
using OrbString = std::uint64_t;

/// C(norb, k) without overflow for the determinant counts in play
/// (norb <= 64, products up to ~1e18).
inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        // multiply first where divisible to keep intermediates exact
        const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
        result = (result / g) * num / (static_cast<std::uint64_t>(i) / g);
    }
    return result;
}

/// Number of determinants in the (n_alpha, n_beta) sector, without
/// materializing anything.
inline std::uint64_t determinant_count(int norb, int n_alpha, int n_beta) {
    if (norb < 0 || norb > 64) throw std::invalid_argument("determinant_count: norb out of range");
    if (n_alpha < 0 || n_beta < 0 || n_alpha > norb || n_beta > norb)
        throw std::invalid_argument("determinant_count: electron count out of range");
    return binomial(norb, n_alpha) * binomial(norb, n_beta);
}

/// All norb-bit strings with exactly k bits set, strictly increasing as
/// integers (Gosper's hack).
inline std::vector<OrbString> enumerate_strings(int norb, int k) {
    if (norb < 0 || norb > 63) throw std::invalid_argument("enumerate_strings: norb out of range");
    if (k < 0 || k > norb) throw std::invalid_argument("enumerate_strings: k out of range");
    std::vector<OrbString> out;
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    const OrbString limit = (norb == 63) ? ~OrbString{0} >> 1 : (OrbString{1} << norb);
    OrbString v = (OrbString{1} << k) - 1;
    while (v < limit) {
        out.push_back(v);
        const OrbString c = v & (~v + 1);
        const OrbString r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
        if (c == 0) break;
    }
    return out;
}

/**
 * Slater-determinant basis of an S_z sector: the alpha and beta strings in
 * lexicographic (integer) order, determinant index = ia * |beta| + ib.
 */
struct DeterminantBasis {
    int norb = 0;
    int n_alpha = 0;
    int n_beta = 0;
    std::vector<OrbString> alpha_strings;
    std::vector<OrbString> beta_strings;

    std::size_t n_det() const { return alpha_strings.size() * beta_strings.size(); }
    std::size_t index(std::size_t ia, std::size_t ib) const { return ia * beta_strings.size() + ib; }
};

inline DeterminantBasis enumerate_basis(int norb, int n_alpha, int n_beta) {
    DeterminantBasis b;
    b.norb = norb;
    b.n_alpha = n_alpha;
    b.n_beta = n_beta;
    b.alpha_strings = enumerate_strings(norb, n_alpha);
    b.beta_strings = enumerate_strings(norb, n_beta);
    return b;
}

/// Index of a string in a sorted enumeration; the strings are strictly
/// increasing so lookup is a binary search.
inline std::size_t string_index(const std::vector<OrbString>& strings, OrbString s) {
    const auto it = std::lower_bound(strings.begin(), strings.end(), s);
    if (it == strings.end() || *it != s) throw std::logic_error("string_index: string not in enumeration");
    return static_cast<std::size_t>(it - strings.begin());
}

inline int popcount_below(OrbString s, int orbital) {
    return std::popcount(s & ((OrbString{1} << orbital) - 1));
}

}  // namespace sbci::fci
