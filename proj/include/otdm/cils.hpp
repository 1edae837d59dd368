#pragma once

// Crosstalk identification and localization over destination tap
// measurements. Identification turns a tap into a clean/fault verdict via
// the normalized crosstalk; localization inverts the measurement into a
// stage count N and walks the lightpath back to the originating router:
// with contamination covering the last N hops of a k-stage path, the fault
// sits at stage x = k - N + 1, and y is the path's router index there.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "otdm/crosstalk.hpp"
#include "otdm/errors.hpp"
#include "otdm/simulator.hpp"
#include "otdm/topology.hpp"

namespace otdm {

struct DetectionVerdict {
    enum class Kind { clean, fault };

    Kind kind = Kind::clean;
    double x_meas = 0.0;  // measured normalized crosstalk

    bool is_fault() const { return kind == Kind::fault; }
};

struct LocalizationReport {
    std::uint64_t packet_id = 0;
    double x_meas = 0.0;
    int n_count = 0;         // contaminated stages N
    NodeCoord fault_node;    // inferred (x, y)
    double residual = 0.0;
    AccumulationMode mode = AccumulationMode::multiplicative;
};

// Halfway between a clean signal and one contaminated stage.
inline double default_threshold(const CrosstalkParams& params) { return params.unit() / 2.0; }

// Photodetect the tapped signal and compare the normalized crosstalk
// against the detection threshold. Readout is exact; measurement noise, if
// modeled, is applied to the tap beforehand (see apply_relative_noise).
inline DetectionVerdict identify(double p_in_mw, double s_out_mw, double threshold,
                                 double slack_mw = kDefaultMeasurementSlackMw) {
    if (!(threshold >= 0.0)) {
        throw InvalidParameterError("identify: threshold must be >= 0, got " +
                                    std::to_string(threshold));
    }
    const double x_meas = normalized_crosstalk(s_out_mw, p_in_mw, slack_mw);
    if (x_meas <= threshold) return DetectionVerdict{DetectionVerdict::Kind::clean, x_meas};
    return DetectionVerdict{DetectionVerdict::Kind::fault, x_meas};
}

// Count contaminated stages from the measurement and name the originating
// router on the path.
inline LocalizationReport localize(double x_meas, const Lightpath& path,
                                   const CrosstalkParams& params,
                                   double tol = kDefaultTolerance, std::uint64_t packet_id = 0) {
    if (!(x_meas > 0.0)) {
        throw InvalidParameterError("localize: measured crosstalk must be > 0, got " +
                                    std::to_string(x_meas));
    }
    const int k = path.stage_count();
    if (k < 1) {
        throw InvalidParameterError("localize: path must have at least one hop");
    }
    const StageCountResult inversion = invert_stage_count(x_meas, params, tol);
    if (inversion.count == 0) {
        throw NothingToLocalizeError("measured crosstalk " + std::to_string(x_meas) +
                                     " is below one stage unit; nothing to localize");
    }
    if (inversion.count > k) {
        throw InfeasibleCountError("counted " + std::to_string(inversion.count) +
                                       " contaminated stages on a " + std::to_string(k) +
                                       "-stage path; measured crosstalk exceeds what the path "
                                       "can accumulate",
                                   inversion.count, k);
    }
    const int stage = k - inversion.count + 1;
    const NodeCoord node = path.hops[static_cast<std::size_t>(stage - 1)].node;
    return LocalizationReport{packet_id, x_meas, inversion.count, node, inversion.residual,
                              params.mode()};
}

// Outcome of running CILS on one tap.
struct CilsEntry {
    enum class Status { clean, localized, failed };

    std::uint64_t packet_id = 0;
    Status status = Status::clean;
    double x_meas = std::numeric_limits<double>::quiet_NaN();
    std::optional<LocalizationReport> report;  // set when localized
    std::string error_code;                    // set when failed
    std::string error_detail;
};

// Run identification on every tap and localization on every fault verdict.
// Clean taps yield no report; per-tap domain errors become failed entries
// instead of aborting the batch. Entry order follows tap order.
inline std::vector<CilsEntry> run_cils(const NetworkTopology& topo,
                                       const SimulationResult& result,
                                       const CrosstalkParams& params, double threshold,
                                       double tol = kDefaultTolerance,
                                       double slack_mw = kDefaultMeasurementSlackMw) {
    std::vector<CilsEntry> entries;
    entries.reserve(result.taps.size());
    for (const TapMeasurement& tap : result.taps) {
        if (tap.path.stage_count() != topo.stages()) {
            throw InvalidParameterError("run_cils: tap for packet " +
                                        std::to_string(tap.packet_id) +
                                        " was not produced against this topology");
        }
        CilsEntry entry;
        entry.packet_id = tap.packet_id;
        try {
            const DetectionVerdict verdict = identify(tap.p_in_mw, tap.s_out_mw, threshold,
                                                      slack_mw);
            entry.x_meas = verdict.x_meas;
            if (!verdict.is_fault()) {
                entry.status = CilsEntry::Status::clean;
            } else {
                entry.report = localize(verdict.x_meas, tap.path, params, tol, tap.packet_id);
                entry.status = CilsEntry::Status::localized;
            }
        } catch (const Error& e) {
            entry.status = CilsEntry::Status::failed;
            entry.error_code = e.code();
            entry.error_detail = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

inline std::vector<LocalizationReport> localization_reports(const std::vector<CilsEntry>& entries) {
    std::vector<LocalizationReport> reports;
    for (const CilsEntry& entry : entries) {
        if (entry.status == CilsEntry::Status::localized) reports.push_back(*entry.report);
    }
    return reports;
}

}  // namespace otdm
