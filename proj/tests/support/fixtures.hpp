#pragma once

// Deterministic FCI fixture problems. The checked-in FCIDUMP files under
// tests/data/ were emitted from these generators; tests parse the files and
// can cross-check against the in-memory construction.

#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "sbci/fci/fcidump.hpp"

namespace fixtures {

/// Random spin-free integrals with exact 8-fold permutational symmetry and a
/// diagonal-dominant one-electron part, so the CI diagonal is meaningful.
inline sbci::fci::FciProblem random_problem(int norb, int nelec, int ms2, double e_core,
                                            std::uint64_t seed) {
    sbci::fci::FciProblem prob(norb);
    prob.nelec = nelec;
    prob.ms2 = ms2;
    prob.e_core = e_core;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    for (int i = 0; i < norb; ++i)
        for (int j = i; j < norb; ++j) {
            if (i == j)
                prob.set_h1(i, i, -2.0 + 0.7 * i + 0.05 * u(rng));
            else
                prob.set_h1(i, j, 0.12 * u(rng));
        }

    auto pair_id = [&](int i, int j) { return (i > j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i); };
    for (int i = 0; i < norb; ++i)
        for (int j = 0; j <= i; ++j)
            for (int k = 0; k < norb; ++k)
                for (int l = 0; l <= k; ++l) {
                    if (pair_id(i, j) < pair_id(k, l)) continue;
                    double v;
                    if (i == j && k == l)
                        v = (i == k) ? 0.55 + 0.1 * u(rng) : 0.18 + 0.05 * u(rng);  // Coulomb-like
                    else
                        v = 0.08 * u(rng);
                    prob.set_eri(i, j, k, l, v);
                }
    return prob;
}

/// 4 orbitals, 2 electrons, S_z = 0: a 16-determinant sector.
inline sbci::fci::FciProblem h4_2e() { return random_problem(4, 2, 0, -1.5, 20240811); }

/// 6 orbitals, 4 electrons, S_z = 0: the 225-determinant sector.
inline sbci::fci::FciProblem h6_4e() { return random_problem(6, 4, 0, 2.25, 71); }

/// Emits the canonical triangle the same way the checked-in files store it.
inline void write_fcidump(std::ostream& out, const sbci::fci::FciProblem& prob) {
    char buf[96];
    out << "&FCI NORB=" << prob.norb << ",NELEC=" << prob.nelec << ",MS2=" << prob.ms2 << ",\n";
    out << " ORBSYM=";
    for (int i = 0; i < prob.norb; ++i) out << "1,";
    out << "\n ISYM=1,\n&END\n";

    auto pair_id = [&](int i, int j) { return (i > j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i); };
    for (int i = 0; i < prob.norb; ++i)
        for (int j = 0; j <= i; ++j)
            for (int k = 0; k <= i; ++k)
                for (int l = 0; l <= k; ++l) {
                    if (pair_id(i, j) < pair_id(k, l)) continue;
                    const double v = prob.eri_at(i, j, k, l);
                    if (v == 0.0) continue;
                    std::snprintf(buf, sizeof buf, "%.17g %d %d %d %d\n", v, i + 1, j + 1, k + 1, l + 1);
                    out << buf;
                }
    for (int i = 0; i < prob.norb; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = prob.h1_at(i, j);
            if (v == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%.17g %d %d 0 0\n", v, i + 1, j + 1);
            out << buf;
        }
    std::snprintf(buf, sizeof buf, "%.17g 0 0 0 0\n", prob.e_core);
    out << buf;
}

inline std::string data_dir() {
#ifdef SBCI_TEST_DATA_DIR
    return SBCI_TEST_DATA_DIR;
#else
    return "tests/data";
#endif
}

}  // namespace fixtures
