#pragma once

// Crosstalk arithmetic for cascades of parallel TOAD routers: per-hop
// output power, normalized crosstalk at a tap, series accumulation over
// contaminated stages, and the inversion of a measurement back to a stage
// count. All coefficients are dimensionless linear power ratios; powers
// are in mW.

#include <cmath>
#include <string>

#include "otdm/errors.hpp"

namespace otdm {

// How crosstalk accumulates over a series of contaminated routers.
// multiplicative compounds the per-stage factor (1 + n*x_tot); linear is
// its first-order expansion, one additive unit per stage.
enum class AccumulationMode { linear, multiplicative };

inline const char* to_string(AccumulationMode mode) {
    return mode == AccumulationMode::linear ? "linear" : "multiplicative";
}

inline AccumulationMode accumulation_mode_from_string(const std::string& name) {
    if (name == "linear") return AccumulationMode::linear;
    if (name == "multiplicative") return AccumulationMode::multiplicative;
    throw InvalidParameterError("accumulation mode must be \"linear\" or \"multiplicative\", got \"" +
                                name + "\"");
}

inline constexpr double kDefaultTolerance = 1e-9;

// Absolute power slack (mW): a measured output below p0 minus this much is
// treated as signal loss rather than crosstalk.
inline constexpr double kDefaultMeasurementSlackMw = 0.01;

// Per-router crosstalk coefficients plus the parallel degree n of the
// router (2 for the 2x2 parallel router). Validated on construction:
// coefficients non-negative, x_tot = x_inter + x_intra < 1, n >= 1.
class CrosstalkParams {
public:
    CrosstalkParams(double x_inter, double x_intra, int parallel_degree,
                    AccumulationMode mode = AccumulationMode::multiplicative)
        : x_inter_(x_inter), x_intra_(x_intra), parallel_degree_(parallel_degree), mode_(mode) {
        if (!(x_inter_ >= 0.0)) {
            throw InvalidParameterError("x_inter must be >= 0, got " + std::to_string(x_inter_));
        }
        if (!(x_intra_ >= 0.0)) {
            throw InvalidParameterError("x_intra must be >= 0, got " + std::to_string(x_intra_));
        }
        if (!(x_tot() < 1.0)) {
            throw InvalidParameterError("x_inter + x_intra must be < 1, got " +
                                        std::to_string(x_tot()));
        }
        if (parallel_degree_ < 1) {
            throw InvalidParameterError("parallel degree n must be >= 1, got " +
                                        std::to_string(parallel_degree_));
        }
    }

    double x_inter() const { return x_inter_; }
    double x_intra() const { return x_intra_; }
    int parallel_degree() const { return parallel_degree_; }
    AccumulationMode mode() const { return mode_; }

    double x_tot() const { return x_inter_ + x_intra_; }

    // Per-stage crosstalk unit n * x_tot.
    double unit() const { return parallel_degree_ * x_tot(); }

private:
    double x_inter_;
    double x_intra_;
    int parallel_degree_;
    AccumulationMode mode_;
};

// Output power of n parallel routers fed with p_in: p_in * (1 + n*x_tot).
// n = 1 is the single-router form.
inline double parallel_router_output(double p_in_mw, const CrosstalkParams& params) {
    if (!(p_in_mw > 0.0)) {
        throw InvalidParameterError("parallel_router_output: input power must be > 0 mW, got " +
                                    std::to_string(p_in_mw));
    }
    return p_in_mw * (1.0 + params.unit());
}

// Fractional excess power at a tap: (s - p0) / p0. A reading more than
// slack_mw below the launch power cannot be explained by crosstalk and is
// rejected as measurement-inconsistent.
inline double normalized_crosstalk(double s_mw, double p0_mw,
                                   double slack_mw = kDefaultMeasurementSlackMw) {
    if (!(p0_mw > 0.0)) {
        throw InvalidParameterError("normalized_crosstalk: launch power must be > 0 mW, got " +
                                    std::to_string(p0_mw));
    }
    if (!(slack_mw >= 0.0)) {
        throw InvalidParameterError("normalized_crosstalk: slack must be >= 0 mW");
    }
    if (s_mw < p0_mw - slack_mw) {
        throw MeasurementInconsistentError(
            "measured power " + std::to_string(s_mw) + " mW is below launch power " +
            std::to_string(p0_mw) + " mW by more than the slack " + std::to_string(slack_mw) +
            " mW; signal loss, not crosstalk");
    }
    return (s_mw - p0_mw) / p0_mw;
}

// Crosstalk accumulated over `stages` contaminated routers in series:
// (1 + n*x_tot)^stages - 1 in multiplicative mode, stages * n*x_tot in
// linear mode. `stages` counts contaminated routers, not total path length.
inline double series_crosstalk(const CrosstalkParams& params, int stages) {
    if (stages < 0) {
        throw InvalidParameterError("series_crosstalk: stage count must be >= 0, got " +
                                    std::to_string(stages));
    }
    if (params.mode() == AccumulationMode::linear) {
        return static_cast<double>(stages) * params.unit();
    }
    return std::pow(1.0 + params.unit(), stages) - 1.0;
}

struct StageCountResult {
    int count = 0;  // N; the inversion performs exactly this many iterations
    double residual = 0.0;
};

// Invert series_crosstalk: strip one per-stage unit u = n*x_tot at a time
// (subtraction in linear mode, division of 1 + remainder by 1 + u in
// multiplicative mode) while the remainder is at least u - tol, so exact
// multiples count fully. If x_meas = series_crosstalk(params, j) in the
// same mode, this returns count = j with |residual| <= tol.
inline StageCountResult invert_stage_count(double x_meas, const CrosstalkParams& params,
                                           double tol = kDefaultTolerance) {
    if (!(x_meas >= 0.0)) {
        throw InvalidParameterError("invert_stage_count: measured crosstalk must be >= 0, got " +
                                    std::to_string(x_meas));
    }
    if (!(tol > 0.0)) {
        throw InvalidParameterError("invert_stage_count: tolerance must be > 0");
    }
    const double unit = params.unit();
    if (unit <= tol) {
        throw NonIdentifiableUnitError("per-stage unit n*x_tot = " + std::to_string(unit) +
                                       " is not above the tolerance " + std::to_string(tol) +
                                       "; stage counting is impossible");
    }

    StageCountResult result;
    double remainder = x_meas;
    if (params.mode() == AccumulationMode::linear) {
        while (remainder >= unit - tol) {
            remainder -= unit;
            ++result.count;
        }
    } else {
        while (remainder >= unit - tol) {
            remainder = (1.0 + remainder) / (1.0 + unit) - 1.0;
            ++result.count;
        }
    }
    result.residual = remainder;
    if (remainder > tol) {
        throw AmbiguousMeasurementError(
            "residual " + std::to_string(remainder) + " after " + std::to_string(result.count) +
                " stage units exceeds the tolerance; measurement is not an integer number of " +
                "stage units (model mismatch or multiple independent faults)",
            result.count, remainder);
    }
    return result;
}

}  // namespace otdm
