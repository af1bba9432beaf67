#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sbci/operator.hpp"

namespace sbci {

struct MatrixMarketError : std::runtime_error {
    int line;
    MatrixMarketError(int line_no, const std::string& what)
        : std::runtime_error("matrix market, line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

/// Reads `matrix coordinate real symmetric` content (1-based indices).
inline std::shared_ptr<SparseOperator> read_matrix_market(std::istream& in) {
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw MatrixMarketError(1, "empty input");
    ++line_no;
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        if (banner != "%%MatrixMarket" || object != "matrix")
            throw MatrixMarketError(line_no, "expected %%MatrixMarket matrix header");
        if (format != "coordinate" || field != "real" || symmetry != "symmetric")
            throw MatrixMarketError(line_no, "only coordinate real symmetric is supported, got " + format +
                                                 " " + field + " " + symmetry);
    }

    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_size = false;
    std::vector<SparseOperator::Entry> entries;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        if (!have_size) {
            long long r = 0, c = 0, z = 0;
            if (!(ls >> r >> c >> z) || r <= 0 || c <= 0 || z < 0)
                throw MatrixMarketError(line_no, "bad size line");
            if (r != c) throw MatrixMarketError(line_no, "symmetric matrix must be square");
            rows = static_cast<std::size_t>(r);
            cols = static_cast<std::size_t>(c);
            nnz = static_cast<std::size_t>(z);
            entries.reserve(nnz);
            have_size = true;
            continue;
        }
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) throw MatrixMarketError(line_no, "bad entry line");
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols)
            throw MatrixMarketError(line_no, "index out of range");
        entries.push_back({static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1, v});
    }
    if (!have_size) throw MatrixMarketError(line_no + 1, "missing size line");
    if (entries.size() != nnz)
        throw MatrixMarketError(line_no + 1, "entry count " + std::to_string(entries.size()) +
                                                 " does not match header " + std::to_string(nnz));
    return std::make_shared<SparseOperator>(rows, std::move(entries));
}

inline std::shared_ptr<SparseOperator> read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_matrix_market(in);
}

/// Writes the stored triangle with 17 significant digits so a read-back
/// reproduces every entry bit-exactly.
inline void write_matrix_market(std::ostream& out, const SparseOperator& op) {
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << op.dim() << " " << op.dim() << " " << op.nnz() << "\n";
    char buf[64];
    for (const auto& e : op.entries()) {
        // stored triangle has row <= col; emit lower-triangle convention
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", e.col + 1, e.row + 1, e.value);
        out << buf;
    }
}

inline void write_matrix_market_file(const std::string& path, const SparseOperator& op) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_matrix_market(out, op);
}

}  // namespace sbci
