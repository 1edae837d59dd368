#pragma once

// End-to-end scenario execution and the worst-case scaling sweep, with
// deterministic CSV emission. CSV column order is part of the public
// contract; the sweep's wall-time column is the only nondeterministic
// field anywhere.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "otdm/cils.hpp"
#include "otdm/crosstalk.hpp"
#include "otdm/scenario.hpp"
#include "otdm/simulator.hpp"
#include "otdm/topology.hpp"

namespace otdm {

namespace detail {

inline std::string format_double(double value) {
    if (std::isnan(value)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

}  // namespace detail

inline constexpr const char* kRunCsvHeader =
    "packet_id,src,dst,p0_mw,s_out_mw,x_meas,verdict,N,fault_x,fault_y,residual,slots";

struct ScenarioRunOutput {
    SimulationResult sim;
    std::vector<CilsEntry> entries;  // one per tap, tap order
    std::string report_text;         // human-readable summary
    std::string csv_text;            // kRunCsvHeader rows, one per tap
};

// Simulate the scenario, run CILS over the taps and render both output
// documents. Deterministic: identical configs produce byte-identical CSV.
inline ScenarioRunOutput cmd_run(const ScenarioConfig& config) {
    const NetworkTopology topo = build_banyan(config.k);
    const CrosstalkParams params = config.params();
    const std::vector<Packet> packets = config.packets();

    ScenarioRunOutput out;
    out.sim = simulate_slots(topo, packets, params, config.faults);
    if (config.noise_r > 0.0) {
        apply_relative_noise(out.sim, config.noise_r, config.noise_seed);
    }
    out.entries = run_cils(topo, out.sim, params, config.threshold, config.tol, config.slack_mw);

    std::ostringstream csv;
    csv << kRunCsvHeader << "\n";
    for (std::size_t i = 0; i < out.sim.taps.size(); ++i) {
        const TapMeasurement& tap = out.sim.taps[i];
        const CilsEntry& entry = out.entries[i];
        const TrafficEntry& t = config.traffic[static_cast<std::size_t>(tap.packet_id)];
        csv << tap.packet_id << ',' << t.src << ',' << t.dst << ','
            << detail::format_double(tap.p_in_mw) << ',' << detail::format_double(tap.s_out_mw)
            << ',' << detail::format_double(entry.x_meas) << ',';
        switch (entry.status) {
            case CilsEntry::Status::clean:
                csv << "clean,,,,";
                break;
            case CilsEntry::Status::localized:
                csv << "fault," << entry.report->n_count << ',' << entry.report->fault_node.stage
                    << ',' << entry.report->fault_node.index << ','
                    << detail::format_double(entry.report->residual);
                break;
            case CilsEntry::Status::failed:
                csv << entry.error_code << ",,,,";
                break;
        }
        csv << ',' << (tap.slot_delivered - t.slot) << "\n";
    }
    out.csv_text = csv.str();

    std::ostringstream report;
    report << "fabric: " << topo.num_ports() << " ports, " << topo.stages() << " stages, "
           << topo.routers_per_stage() << " routers/stage (" << topo.wiring_name() << " wiring)\n";
    report << "params: x_inter=" << detail::format_double(config.x_inter)
           << " x_intra=" << detail::format_double(config.x_intra) << " n=" << config.n
           << " mode=" << to_string(config.mode)
           << " (per-stage unit " << detail::format_double(params.unit()) << ")\n";
    report << "detection: threshold=" << detail::format_double(config.threshold)
           << " tol=" << detail::format_double(config.tol)
           << " noise_r=" << detail::format_double(config.noise_r) << "\n";
    report << "traffic: " << config.traffic.size() << " packets, faults: " << config.faults.size()
           << "\n";
    report << "delivered: " << out.sim.taps.size() << ", dropped: " << out.sim.dropped.size()
           << ", buffering events: " << out.sim.buffered_events
           << ", slots elapsed: " << out.sim.slots_elapsed << "\n";
    if (!out.sim.dropped.empty()) {
        report << "dropped packet ids:";
        for (std::uint64_t id : out.sim.dropped) report << ' ' << id;
        report << "\n";
    }
    std::size_t faults_found = 0;
    std::size_t diagnostics = 0;
    for (const CilsEntry& entry : out.entries) {
        if (entry.status == CilsEntry::Status::localized) ++faults_found;
        if (entry.status == CilsEntry::Status::failed) ++diagnostics;
    }
    report << "verdicts: " << (out.entries.size() - faults_found - diagnostics) << " clean, "
           << faults_found << " fault, " << diagnostics << " diagnostic\n";
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        const CilsEntry& entry = out.entries[i];
        const TrafficEntry& t = config.traffic[static_cast<std::size_t>(entry.packet_id)];
        if (entry.status == CilsEntry::Status::localized) {
            report << "  packet " << entry.packet_id << " (" << t.src << "->" << t.dst
                   << "): x_meas=" << detail::format_double(entry.x_meas) << " N="
                   << entry.report->n_count << " fault at (" << entry.report->fault_node.stage
                   << ", " << entry.report->fault_node.index
                   << ") residual=" << detail::format_double(entry.report->residual) << "\n";
        } else if (entry.status == CilsEntry::Status::failed) {
            report << "  packet " << entry.packet_id << " (" << t.src << "->" << t.dst
                   << "): " << entry.error_code << ": " << entry.error_detail << "\n";
        }
    }
    out.report_text = report.str();
    return out;
}

inline constexpr const char* kSweepCsvHeader = "k,x_meas,N,localize_wall_ns,iterations";

struct SweepConfig {
    int k_min = 1;
    int k_max = 1;
    double x_inter = 0.0;
    double x_intra = 0.0;
    int n = 1;
    AccumulationMode mode = AccumulationMode::multiplicative;
    double tol = kDefaultTolerance;
};

struct SweepRow {
    int k = 0;
    double x_meas = 0.0;
    int n_count = 0;              // recovered stage count, equals k by construction
    std::int64_t localize_wall_ns = 0;
    int iterations = 0;           // inversion loop iterations
};

inline constexpr int kSweepMaxStages = 20;

// Worst case at every fabric size in [k_min, k_max]: a fault at stage 1 of
// the fixed path 0 -> 2^k-1, so all k stages are contaminated. Wall time is
// the mean of repeated localize calls on a monotonic clock.
inline std::vector<SweepRow> cmd_sweep(const SweepConfig& sweep) {
    if (sweep.k_min < 1 || sweep.k_min > sweep.k_max || sweep.k_max > kSweepMaxStages) {
        throw InvalidParameterError("sweep: stage range must satisfy 1 <= k_min <= k_max <= " +
                                    std::to_string(kSweepMaxStages));
    }
    const CrosstalkParams params(sweep.x_inter, sweep.x_intra, sweep.n, sweep.mode);

    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(sweep.k_max - sweep.k_min + 1));
    for (int k = sweep.k_min; k <= sweep.k_max; ++k) {
        const NetworkTopology topo = build_banyan(k);
        const Lightpath path = topo.route(0, topo.num_ports() - 1);
        const FaultSpec fault{path.hops.front().node};
        const double s_out = propagate(topo, path, 1.0, params, fault);
        const double x_meas = normalized_crosstalk(s_out, 1.0);

        LocalizationReport report{};
        using Clock = std::chrono::steady_clock;
        // Warm up, then repeat until the sample is long enough to trust.
        for (int i = 0; i < 3; ++i) report = localize(x_meas, path, params, sweep.tol);
        std::int64_t reps = 0;
        const auto start = Clock::now();
        Clock::time_point now;
        do {
            report = localize(x_meas, path, params, sweep.tol);
            ++reps;
            now = Clock::now();
        } while (now - start < std::chrono::microseconds(200) && reps < 20000);
        const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(now - start);

        SweepRow row;
        row.k = k;
        row.x_meas = x_meas;
        row.n_count = report.n_count;
        row.localize_wall_ns = elapsed.count() / reps;
        row.iterations = report.n_count;
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream csv;
    csv << kSweepCsvHeader << "\n";
    for (const SweepRow& row : rows) {
        csv << row.k << ',' << detail::format_double(row.x_meas) << ',' << row.n_count << ','
            << row.localize_wall_ns << ',' << row.iterations << "\n";
    }
    return csv.str();
}

}  // namespace otdm
