#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace otdm {

// Base of all domain errors. code() is a stable kebab-case identifier used
// when an error has to be reported as data (CSV verdict column, batch
// diagnostics) instead of thrown across the caller.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class InvalidParameterError : public Error {
public:
    explicit InvalidParameterError(const std::string& what)
        : Error("invalid-parameter", what) {}
};

// Measured power fell below the launch power by more than the allowed
// slack: attenuation or signal loss, not crosstalk.
class MeasurementInconsistentError : public Error {
public:
    explicit MeasurementInconsistentError(const std::string& what)
        : Error("measurement-inconsistent", what) {}
};

// Per-stage crosstalk unit n*x_tot is too small relative to the tolerance
// to count stages at all.
class NonIdentifiableUnitError : public Error {
public:
    explicit NonIdentifiableUnitError(const std::string& what)
        : Error("non-identifiable-unit", what) {}
};

// Remainder left after stage-count inversion exceeds the tolerance: the
// measurement is not an integer number of per-stage units. Signals model
// mismatch or several independent faults on the path.
class AmbiguousMeasurementError : public Error {
public:
    AmbiguousMeasurementError(const std::string& what, int count, double residual)
        : Error("ambiguous-measurement", what), count_(count), residual_(residual) {}

    int count() const noexcept { return count_; }
    double residual() const noexcept { return residual_; }

private:
    int count_;
    double residual_;
};

// Stage count came back zero; the caller asked to localize a clean signal.
class NothingToLocalizeError : public Error {
public:
    explicit NothingToLocalizeError(const std::string& what)
        : Error("nothing-to-localize", what) {}
};

// Counted more contaminated stages than the path has hops: the measured
// crosstalk exceeds what this path can accumulate (wrong parameters or
// off-path contamination).
class InfeasibleCountError : public Error {
public:
    InfeasibleCountError(const std::string& what, int count, int path_stages)
        : Error("infeasible-count", what), count_(count), path_stages_(path_stages) {}

    int count() const noexcept { return count_; }
    int path_stages() const noexcept { return path_stages_; }

private:
    int count_;
    int path_stages_;
};

class ScenarioParseError : public Error {
public:
    explicit ScenarioParseError(const std::string& what)
        : Error("parse-error", what) {}
};

}  // namespace otdm
