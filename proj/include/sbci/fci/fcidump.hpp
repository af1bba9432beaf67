#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbci::fci {

struct FcidumpError : std::runtime_error {
    int line;
    FcidumpError(int line_no, const std::string& what)
        : std::runtime_error("fcidump, line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

/**
 * Integrals of the electronic Hamiltonian in an orthonormal orbital basis:
 * core energy, one-electron matrix, and chemist-notation (ij|kl) two-electron
 * integrals stored with all eight permutations populated. Hartree throughout.
 */
struct FciProblem {
    int norb = 0;
    int nelec = 0;
    int ms2 = 0;
    double e_core = 0.0;
    std::vector<double> h1;   // norb^2
    std::vector<double> eri;  // norb^4

    explicit FciProblem(int n = 0) { resize(n); }

    void resize(int n) {
        if (n < 0 || n > 32) throw std::invalid_argument("FciProblem: norb must be in [0, 32]");
        norb = n;
        h1.assign(static_cast<std::size_t>(n) * n, 0.0);
        eri.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    }

    double h1_at(int i, int j) const { return h1[static_cast<std::size_t>(i) * norb + j]; }
    double eri_at(int i, int j, int k, int l) const {
        return eri[((static_cast<std::size_t>(i) * norb + j) * norb + k) * norb + l];
    }

    void set_h1(int i, int j, double v) {
        h1[static_cast<std::size_t>(i) * norb + j] = v;
        h1[static_cast<std::size_t>(j) * norb + i] = v;
    }

    /// Populates all 8 chemist-notation permutations of (ij|kl).
    void set_eri(int i, int j, int k, int l, double v) {
        auto put = [&](int a, int b, int c, int d) {
            eri[((static_cast<std::size_t>(a) * norb + b) * norb + c) * norb + d] = v;
        };
        put(i, j, k, l);
        put(j, i, k, l);
        put(i, j, l, k);
        put(j, i, l, k);
        put(k, l, i, j);
        put(l, k, i, j);
        put(k, l, j, i);
        put(l, k, j, i);
    }

    int n_alpha() const { return (nelec + ms2) / 2; }
    int n_beta() const { return (nelec - ms2) / 2; }
};

namespace detail {

/// Pulls "KEY=integer" out of the FCIDUMP namelist text.
inline bool namelist_int(const std::string& header, const std::string& key, int& out) {
    std::size_t pos = 0;
    while ((pos = header.find(key, pos)) != std::string::npos) {
        const std::size_t after = pos + key.size();
        // must be a standalone token followed by '='
        if (pos > 0 && (std::isalnum(static_cast<unsigned char>(header[pos - 1])) || header[pos - 1] == '_')) {
            pos = after;
            continue;
        }
        std::size_t p = after;
        while (p < header.size() && std::isspace(static_cast<unsigned char>(header[p]))) ++p;
        if (p >= header.size() || header[p] != '=') {
            pos = after;
            continue;
        }
        ++p;
        while (p < header.size() && std::isspace(static_cast<unsigned char>(header[p]))) ++p;
        std::size_t end = p;
        if (end < header.size() && (header[end] == '+' || header[end] == '-')) ++end;
        while (end < header.size() && std::isdigit(static_cast<unsigned char>(header[end]))) ++end;
        if (end == p) return false;
        out = std::stoi(header.substr(p, end - p));
        return true;
    }
    return false;
}

}  // namespace detail

/**
 * Molpro-style FCIDUMP reader: `&FCI NORB=..., NELEC=..., MS2=...` namelist
 * (possibly spanning lines, ended by `&END` or `/`), then `value i j k l`
 * records with 1-based indices. `i j 0 0` is one-electron, `0 0 0 0` the core
 * energy; unspecified integrals are zero.
 */
inline FciProblem parse_fcidump(std::istream& in) {
    std::string line;
    int line_no = 0;

    std::string header;
    bool header_done = false;
    bool saw_begin = false;
    while (!header_done && std::getline(in, line)) {
        ++line_no;
        if (!saw_begin) {
            const std::size_t amp = line.find("&FCI");
            if (amp == std::string::npos) {
                if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
                throw FcidumpError(line_no, "expected &FCI namelist header");
            }
            saw_begin = true;
        }
        std::string upper = line;
        for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        header += " " + upper;
        if (upper.find("&END") != std::string::npos || upper.find('/') != std::string::npos)
            header_done = true;
    }
    if (!saw_begin) throw FcidumpError(line_no, "empty input, no &FCI header");
    if (!header_done) throw FcidumpError(line_no, "unterminated &FCI namelist (missing &END or /)");

    int norb = -1, nelec = -1, ms2 = 0;
    if (!detail::namelist_int(header, "NORB", norb)) throw FcidumpError(line_no, "header missing NORB");
    if (!detail::namelist_int(header, "NELEC", nelec)) throw FcidumpError(line_no, "header missing NELEC");
    if (!detail::namelist_int(header, "MS2", ms2)) throw FcidumpError(line_no, "header missing MS2");
    if (norb < 1) throw FcidumpError(line_no, "NORB must be positive");
    if (nelec < 0 || nelec > 2 * norb) throw FcidumpError(line_no, "NELEC out of range");
    if ((nelec + ms2) % 2 != 0 || std::abs(ms2) > nelec)
        throw FcidumpError(line_no, "MS2 inconsistent with NELEC");

    FciProblem prob(norb);
    prob.nelec = nelec;
    prob.ms2 = ms2;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ls(line);
        double v;
        long i, j, k, l;
        if (!(ls >> v >> i >> j >> k >> l)) throw FcidumpError(line_no, "expected `value i j k l`");
        auto in_range = [&](long idx) { return idx >= 1 && idx <= norb; };
        if (i == 0 && j == 0 && k == 0 && l == 0) {
            prob.e_core = v;
        } else if (k == 0 && l == 0) {
            if (!in_range(i) || !in_range(j)) throw FcidumpError(line_no, "one-electron index out of range");
            prob.set_h1(static_cast<int>(i) - 1, static_cast<int>(j) - 1, v);
        } else {
            if (!in_range(i) || !in_range(j) || !in_range(k) || !in_range(l))
                throw FcidumpError(line_no, "two-electron index out of range");
            prob.set_eri(static_cast<int>(i) - 1, static_cast<int>(j) - 1, static_cast<int>(k) - 1,
                         static_cast<int>(l) - 1, v);
        }
    }
    return prob;
}

inline FciProblem parse_fcidump_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_fcidump(in);
}

}  // namespace sbci::fci
