#include <doctest.h>

#include "sbci/fci/determinants.hpp"

using namespace sbci::fci;

TEST_CASE("sector sizes: binomial products") {
    CHECK(determinant_count(6, 2, 2) == 225);
    CHECK(enumerate_basis(6, 2, 2).n_det() == 225);
}

TEST_CASE("large CAS sector counts, not materialized") {
    CHECK(binomial(26, 5) == 65780);
    CHECK(binomial(26, 4) == 14950);
    CHECK(determinant_count(26, 5, 5) == 4'327'008'400ULL);
    CHECK(determinant_count(26, 5, 4) == 983'411'000ULL);
}

TEST_CASE("count formula exact against Pascal's triangle up to norb = 30") {
    // independent recurrence oracle
    unsigned long long pascal[31][31] = {};
    for (int n = 0; n <= 30; ++n) {
        pascal[n][0] = 1;
        for (int k = 1; k <= n; ++k)
            pascal[n][k] = pascal[n - 1][k - 1] + (k <= n - 1 ? pascal[n - 1][k] : 0);
    }
    for (int n = 0; n <= 30; ++n)
        for (int ka = 0; ka <= n; ++ka)
            for (int kb = 0; kb <= n; kb += 3)
                CHECK(determinant_count(n, ka, kb) == pascal[n][ka] * pascal[n][kb]);
}

TEST_CASE("strings enumerate in strictly increasing order with fixed popcount") {
    const auto strings = enumerate_strings(6, 2);
    REQUIRE(strings.size() == 15);
    for (std::size_t i = 0; i < strings.size(); ++i) {
        CHECK(std::popcount(strings[i]) == 2);
        if (i > 0) CHECK(strings[i] > strings[i - 1]);
    }
    CHECK(strings.front() == 0b000011);
    CHECK(strings.back() == 0b110000);
}

TEST_CASE("string_index inverts the enumeration") {
    const auto strings = enumerate_strings(8, 3);
    for (std::size_t i = 0; i < strings.size(); ++i) CHECK(string_index(strings, strings[i]) == i);
    CHECK_THROWS_AS(string_index(strings, 0b11110000), std::logic_error);
}

TEST_CASE("basis index convention is alpha-major") {
    const auto b = enumerate_basis(5, 2, 1);
    CHECK(b.n_det() == 10 * 5);
    CHECK(b.index(3, 2) == 3 * 5 + 2);
}

TEST_CASE("edge sectors") {
    CHECK(enumerate_strings(4, 0).size() == 1);
    CHECK(enumerate_strings(4, 0)[0] == 0);
    CHECK(enumerate_strings(4, 4).size() == 1);
    CHECK_THROWS_AS(enumerate_strings(4, 5), std::invalid_argument);
}
