#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbci {

/**
 * One solver iteration. Fields that do not apply to a method stay NaN and
 * serialize as empty CSV cells. For sbci2, `b`/`c` carry the diagonal
 * (alpha,alpha) coefficients and the _ab/_ba/_bb columns the rest.
 */
struct TraceRecord {
    static constexpr double absent = std::numeric_limits<double>::quiet_NaN();

    std::string method;      // sbci1 | sbci2 | davidson
    int state = 0;           // alpha
    int pair_partner = -1;   // alpha+1 for sbci2 rows, -1 otherwise
    int t = 0;               // step index within the current restart segment
    double energy = absent;  // E_{t+1} of the tracked state, hartree
    double dE = absent;
    double res_norm = absent;  // |z'_{t+1}|
    double x_norm = absent;    // |x_{t+1}|
    double kinetic = absent;   // y^T M y at the shift that produced y
    std::uint64_t matvecs = 0; // cumulative operator applications
    std::string restart_reason;  // empty unless this step triggered a restart

    double b = absent, c = absent;
    double b_ab = absent, b_ba = absent, b_bb = absent;
    double c_ab = absent, c_ba = absent, c_bb = absent;
    double a_ab = absent, a_ba = absent;
    double energy_partner = absent;
    double x_norm_partner = absent;
    double res_norm_partner = absent;
};

inline const char* trace_csv_header() {
    return "method,state,pair_partner,t,E,dE,res_norm,x_norm,kinetic,matvecs,restart,"
           "b,c,b_ab,b_ba,b_bb,c_ab,c_ba,c_bb,a_ab,a_ba,E_partner,x_norm_partner,res_norm_partner";
}

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void record(const TraceRecord& rec) = 0;
};

/// Keeps records in memory; what the diagnostics and tests consume.
class MemoryTraceSink final : public TraceSink {
public:
    void record(const TraceRecord& rec) override { records_.push_back(rec); }
    const std::vector<TraceRecord>& records() const { return records_; }
    std::vector<TraceRecord>& records() { return records_; }

private:
    std::vector<TraceRecord> records_;
};

/// CSV sink; header written once, one row per record, 17 significant digits.
class CsvTraceSink final : public TraceSink {
public:
    explicit CsvTraceSink(std::ostream& out) : out_(&out) { write_header(); }
    explicit CsvTraceSink(const std::string& path) : file_(new std::ofstream(path)), out_(file_.get()) {
        if (!*file_) throw std::runtime_error("cannot open trace file " + path);
        write_header();
    }

    void record(const TraceRecord& r) override {
        std::ostream& o = *out_;
        o << r.method << ',' << r.state << ',';
        if (r.pair_partner >= 0) o << r.pair_partner;
        o << ',' << r.t << ',';
        cell(o, r.energy);
        cell(o, r.dE);
        cell(o, r.res_norm);
        cell(o, r.x_norm);
        cell(o, r.kinetic);
        o << r.matvecs << ',' << r.restart_reason << ',';
        cell(o, r.b);
        cell(o, r.c);
        cell(o, r.b_ab);
        cell(o, r.b_ba);
        cell(o, r.b_bb);
        cell(o, r.c_ab);
        cell(o, r.c_ba);
        cell(o, r.c_bb);
        cell(o, r.a_ab);
        cell(o, r.a_ba);
        cell(o, r.energy_partner);
        cell(o, r.x_norm_partner);
        cell(o, r.res_norm_partner, /*trailing=*/false);
        o << '\n';
        if (!o) throw std::runtime_error("trace sink: write failed");
    }

private:
    void write_header() { (*out_) << trace_csv_header() << '\n'; }

    static void cell(std::ostream& o, double v, bool trailing = true) {
        if (!std::isnan(v)) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            o << buf;
        }
        if (trailing) o << ',';
    }

    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

/// Fans one record out to several sinks (CSV file + in-memory diagnostics).
class TeeTraceSink final : public TraceSink {
public:
    void add(TraceSink* s) {
        if (s) sinks_.push_back(s);
    }
    void record(const TraceRecord& rec) override {
        for (auto* s : sinks_) s->record(rec);
    }

private:
    std::vector<TraceSink*> sinks_;
};

inline void record_trace(TraceSink& sink, const TraceRecord& rec) { sink.record(rec); }

/// Parses a CSV trace produced by CsvTraceSink.
inline std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace parse: empty input");
    if (line != trace_csv_header()) throw std::runtime_error("trace parse: unexpected header");

    std::vector<TraceRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ',')) f.push_back(cur);
        while (f.size() < 24) f.emplace_back();
        if (f.size() != 24)
            throw std::runtime_error("trace parse: line " + std::to_string(line_no) + " has " +
                                     std::to_string(f.size()) + " fields");
        auto num = [&](const std::string& s) -> double {
            return s.empty() ? TraceRecord::absent : std::stod(s);
        };
        TraceRecord r;
        r.method = f[0];
        r.state = std::stoi(f[1]);
        r.pair_partner = f[2].empty() ? -1 : std::stoi(f[2]);
        r.t = std::stoi(f[3]);
        r.energy = num(f[4]);
        r.dE = num(f[5]);
        r.res_norm = num(f[6]);
        r.x_norm = num(f[7]);
        r.kinetic = num(f[8]);
        r.matvecs = static_cast<std::uint64_t>(std::stoull(f[9]));
        r.restart_reason = f[10];
        r.b = num(f[11]);
        r.c = num(f[12]);
        r.b_ab = num(f[13]);
        r.b_ba = num(f[14]);
        r.b_bb = num(f[15]);
        r.c_ab = num(f[16]);
        r.c_ba = num(f[17]);
        r.c_bb = num(f[18]);
        r.a_ab = num(f[19]);
        r.a_ba = num(f[20]);
        r.energy_partner = num(f[21]);
        r.x_norm_partner = num(f[22]);
        r.res_norm_partner = num(f[23]);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<TraceRecord> read_trace_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file " + path);
    return read_trace_csv(in);
}

/// Per-state piece of a run summary.
struct StateSummary {
    int state = 0;
    double energy = 0.0;
    int iterations = 0;
    int restarts = 0;
    double final_residual = 0.0;
    double s_squared = std::numeric_limits<double>::quiet_NaN();  // filled for FCI runs
};

struct RunSummary {
    std::string method;
    std::vector<StateSummary> states;
    long total_iterations = 0;
    int total_restarts = 0;
    std::uint64_t matvecs = 0;
    int hx_refreshes = 0;
    int peak_vectors = 0;  // simultaneously live length-N vectors in the update loop
    double wall_time_s = 0.0;

    std::vector<double> energies() const {
        std::vector<double> e;
        e.reserve(states.size());
        for (const auto& s : states) e.push_back(s.energy);
        return e;
    }
};

}  // namespace sbci
