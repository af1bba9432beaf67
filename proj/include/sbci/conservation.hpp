#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sbci/trace.hpp"

namespace sbci {

/**
 * Approximate-energy-conservation diagnostic for SBCI1 traces. Each trace row
 * u (state index u+1 within its restart segment) carries E_{u+1}, the kinetic
 * scalar y_{u+1}^T M y_{u+1}, and the coefficients b_u, c_u of the update
 * that produced them. A check at state t >= 2 spans the update
 * (x_{t-1}, y_{t-1}) -> (x_t, y_t) and freezes the classical Hamiltonian at
 * that update's own parameters:
 *   dE_t     = E_{t-1} - E_t
 *   dT_t     = (b/2) (y_t^T M y_t - y_{t-1}^T M y_{t-1})
 *   rhs_t    = (2 / c) dT_t        with (b, c) of the (t-1) -> t update
 *   dev_t    = |dE_t - rhs_t| / max(|dE_t|, |rhs_t|, floor), clamped to 1
 * Conservation holds when dE_t tracks rhs_t, i.e. dev stays small.
 */
struct ConservationSample {
    int state = 0;
    int segment = 0;
    int t = 0;  // state index the check lands on
    double dE = 0.0;
    double rhs = 0.0;
    double dev = 0.0;
};

struct SegmentConservation {
    int state = 0;
    int segment = 0;
    int samples = 0;          // checks with |dE| above the significance floor
    double median_dev = 0.0;
    double p90_dev = 0.0;
};

struct EnergyConservationReport {
    std::vector<ConservationSample> samples;
    std::vector<SegmentConservation> segments;
    bool empty = true;  // no segment offered three consecutive steps
    double significance_floor = 1e-13;

    /// Worst per-segment median over segments that had significant samples.
    double worst_median() const {
        double w = 0.0;
        for (const auto& s : segments)
            if (s.samples > 0) w = std::max(w, s.median_dev);
        return w;
    }
};

namespace detail {

inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

inline EnergyConservationReport energy_conservation_report(const std::vector<TraceRecord>& trace,
                                                           double significance_floor = 1e-13,
                                                           double dev_floor = 1e-16) {
    EnergyConservationReport rep;
    rep.significance_floor = significance_floor;

    // Split sbci1 rows into restart segments: t resets to 0 after a restart
    // (and at each new state).
    std::vector<std::vector<const TraceRecord*>> segments;
    std::vector<std::pair<int, int>> seg_tags;  // (state, segment index within state)
    int cur_state = -1, seg_in_state = -1;
    for (const auto& r : trace) {
        if (r.method != "sbci1") continue;
        const bool new_segment = r.state != cur_state || r.t == 0 || segments.empty();
        if (new_segment) {
            if (r.state != cur_state) seg_in_state = 0;
            else ++seg_in_state;
            cur_state = r.state;
            segments.emplace_back();
            seg_tags.emplace_back(cur_state, seg_in_state);
        }
        segments.back().push_back(&r);
    }

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto& seg = segments[s];
        std::vector<double> devs;
        for (std::size_t u = 1; u < seg.size(); ++u) {
            const TraceRecord& prev = *seg[u - 1];
            const TraceRecord& cur = *seg[u];
            if (std::isnan(prev.kinetic) || std::isnan(cur.kinetic) || std::isnan(cur.c)) continue;
            if (cur.c == 0.0) continue;
            const double dE = prev.energy - cur.energy;
            const double dT = 0.5 * cur.b * (cur.kinetic - prev.kinetic);
            const double rhs = (2.0 / cur.c) * dT;
            double dev = std::abs(dE - rhs) / std::max({std::abs(dE), std::abs(rhs), dev_floor});
            dev = std::min(dev, 1.0);

            ConservationSample sample;
            sample.state = seg_tags[s].first;
            sample.segment = seg_tags[s].second;
            sample.t = static_cast<int>(u) + 1;
            sample.dE = dE;
            sample.rhs = rhs;
            sample.dev = dev;
            rep.samples.push_back(sample);
            rep.empty = false;
            if (std::abs(dE) > significance_floor) devs.push_back(dev);
        }
        SegmentConservation sc;
        sc.state = seg_tags[s].first;
        sc.segment = seg_tags[s].second;
        sc.samples = static_cast<int>(devs.size());
        sc.median_dev = detail::percentile(devs, 0.5);
        sc.p90_dev = detail::percentile(devs, 0.9);
        rep.segments.push_back(sc);
    }
    return rep;
}

}  // namespace sbci
