#pragma once

// Scenario documents: a JSON object describing the fabric, crosstalk
// parameters, injected faults and traffic. Parsing validates every
// cross-referenced range before any simulation starts; errors name the
// offending key and constraint.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "otdm/cils.hpp"
#include "otdm/crosstalk.hpp"
#include "otdm/errors.hpp"
#include "otdm/simulator.hpp"
#include "otdm/topology.hpp"

namespace otdm {

struct TrafficEntry {
    PortId src = 0;
    PortId dst = 0;
    double p0_mw = 1.0;
    std::int64_t slot = 0;
};

struct ScenarioConfig {
    int k = 0;
    double x_inter = 0.0;
    double x_intra = 0.0;
    int n = 1;
    AccumulationMode mode = AccumulationMode::multiplicative;
    double threshold = 0.0;   // detection threshold; defaults to n*x_tot/2
    double tol = kDefaultTolerance;
    double noise_r = 0.0;     // relative measurement noise, 0 disables
    std::uint64_t noise_seed = 1;
    double slack_mw = kDefaultMeasurementSlackMw;
    std::vector<FaultSpec> faults;
    std::vector<TrafficEntry> traffic;

    CrosstalkParams params() const { return CrosstalkParams(x_inter, x_intra, n, mode); }

    std::vector<Packet> packets() const {
        std::vector<Packet> out;
        out.reserve(traffic.size());
        for (std::size_t i = 0; i < traffic.size(); ++i) {
            const TrafficEntry& t = traffic[i];
            out.push_back(Packet{static_cast<std::uint64_t>(i), t.src, t.dst, t.p0_mw, t.slot});
        }
        return out;
    }
};

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string& message) {
    throw ScenarioParseError("scenario: " + message);
}

inline void check_known_keys(const json& obj, const std::string& where,
                             std::initializer_list<const char*> known) {
    for (const auto& item : obj.items()) {
        bool found = false;
        for (const char* key : known) {
            if (item.key() == key) {
                found = true;
                break;
            }
        }
        if (!found) parse_fail(where + "unrecognized key \"" + item.key() + "\"");
    }
}

inline const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline std::int64_t require_int(const json& obj, const std::string& key,
                                const std::string& prefix = "") {
    const json* value = find(obj, key);
    if (!value) parse_fail("missing required key \"" + prefix + key + "\"");
    if (!value->is_number_integer()) parse_fail(prefix + key + " must be an integer");
    return value->get<std::int64_t>();
}

inline double require_number(const json& obj, const std::string& key,
                             const std::string& prefix = "") {
    const json* value = find(obj, key);
    if (!value) parse_fail("missing required key \"" + prefix + key + "\"");
    if (!value->is_number()) parse_fail(prefix + key + " must be a number");
    return value->get<double>();
}

inline std::int64_t optional_int(const json& obj, const std::string& key, std::int64_t fallback,
                                 const std::string& prefix = "") {
    const json* value = find(obj, key);
    if (!value) return fallback;
    if (!value->is_number_integer()) parse_fail(prefix + key + " must be an integer");
    return value->get<std::int64_t>();
}

inline double optional_number(const json& obj, const std::string& key, double fallback,
                              const std::string& prefix = "") {
    const json* value = find(obj, key);
    if (!value) return fallback;
    if (!value->is_number()) parse_fail(prefix + key + " must be a number");
    return value->get<double>();
}

}  // namespace detail

// Parse and validate a scenario document. When coefficients_in_db is set,
// x_inter and x_intra are read as dB values and converted to linear power
// ratios (10^(dB/10)); everything downstream stays linear.
inline ScenarioConfig parse_scenario(const std::string& text, bool coefficients_in_db = false) {
    using detail::parse_fail;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioParseError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) parse_fail("top-level value must be an object");
    detail::check_known_keys(doc, "",
                             {"k", "x_inter", "x_intra", "n", "mode", "threshold", "tol",
                              "noise_r", "noise_seed", "slack_mw", "faults", "traffic"});

    ScenarioConfig config;

    const std::int64_t k = detail::require_int(doc, "k");
    if (k < 1 || k > kMaxStages) {
        parse_fail("k out of range (expected 1.." + std::to_string(kMaxStages) + ", got " +
                   std::to_string(k) + ")");
    }
    config.k = static_cast<int>(k);
    const PortId num_ports = PortId{1} << config.k;
    const PortId routers_per_stage = num_ports >> 1;

    config.x_inter = detail::require_number(doc, "x_inter");
    config.x_intra = detail::require_number(doc, "x_intra");
    if (coefficients_in_db) {
        config.x_inter = std::pow(10.0, config.x_inter / 10.0);
        config.x_intra = std::pow(10.0, config.x_intra / 10.0);
    }
    if (!(config.x_inter >= 0.0)) parse_fail("x_inter must be >= 0");
    if (!(config.x_intra >= 0.0)) parse_fail("x_intra must be >= 0");
    if (!(config.x_inter + config.x_intra < 1.0)) {
        parse_fail("x_inter + x_intra must be < 1, got " +
                   std::to_string(config.x_inter + config.x_intra));
    }

    const std::int64_t n = detail::require_int(doc, "n");
    if (n < 1) parse_fail("n must be >= 1, got " + std::to_string(n));
    config.n = static_cast<int>(n);

    if (const auto* mode = detail::find(doc, "mode")) {
        if (!mode->is_string()) parse_fail("mode must be a string");
        try {
            config.mode = accumulation_mode_from_string(mode->get<std::string>());
        } catch (const InvalidParameterError& e) {
            parse_fail(e.what());
        }
    }

    const double unit = static_cast<double>(config.n) * (config.x_inter + config.x_intra);
    config.threshold = detail::optional_number(doc, "threshold", unit / 2.0);
    if (!(config.threshold >= 0.0)) parse_fail("threshold must be >= 0");
    config.tol = detail::optional_number(doc, "tol", kDefaultTolerance);
    if (!(config.tol > 0.0)) parse_fail("tol must be > 0");
    config.noise_r = detail::optional_number(doc, "noise_r", 0.0);
    if (!(config.noise_r >= 0.0) || config.noise_r >= 1.0) {
        parse_fail("noise_r must be in [0, 1)");
    }
    const std::int64_t seed = detail::optional_int(doc, "noise_seed", 1);
    if (seed < 0) parse_fail("noise_seed must be >= 0");
    config.noise_seed = static_cast<std::uint64_t>(seed);
    config.slack_mw = detail::optional_number(doc, "slack_mw", kDefaultMeasurementSlackMw);
    if (!(config.slack_mw >= 0.0)) parse_fail("slack_mw must be >= 0");

    if (const auto* faults = detail::find(doc, "faults")) {
        if (!faults->is_array()) parse_fail("faults must be an array");
        for (std::size_t i = 0; i < faults->size(); ++i) {
            const auto& entry = (*faults)[i];
            const std::string prefix = "faults[" + std::to_string(i) + "].";
            if (!entry.is_object()) parse_fail("faults[" + std::to_string(i) + "] must be an object");
            detail::check_known_keys(entry, prefix, {"stage", "index"});
            const std::int64_t stage = detail::require_int(entry, "stage", prefix);
            if (stage < 1 || stage > config.k) {
                parse_fail(prefix + "stage out of range (expected 1.." + std::to_string(config.k) +
                           ", got " + std::to_string(stage) + ")");
            }
            const std::int64_t index = detail::require_int(entry, "index", prefix);
            if (index < 0 || static_cast<PortId>(index) >= routers_per_stage) {
                parse_fail(prefix + "index out of range (expected 0.." +
                           std::to_string(routers_per_stage - 1) + ", got " +
                           std::to_string(index) + ")");
            }
            config.faults.push_back(
                FaultSpec{NodeCoord{static_cast<int>(stage), static_cast<PortId>(index)}});
        }
    }

    const auto* traffic = detail::find(doc, "traffic");
    if (!traffic) parse_fail("missing required key \"traffic\"");
    if (!traffic->is_array()) parse_fail("traffic must be an array");
    if (traffic->empty()) parse_fail("traffic must contain at least one packet");
    for (std::size_t i = 0; i < traffic->size(); ++i) {
        const auto& entry = (*traffic)[i];
        const std::string prefix = "traffic[" + std::to_string(i) + "].";
        if (!entry.is_object()) parse_fail("traffic[" + std::to_string(i) + "] must be an object");
        detail::check_known_keys(entry, prefix, {"src", "dst", "p0_mw", "slot"});
        TrafficEntry t;
        const std::int64_t src = detail::require_int(entry, "src", prefix);
        if (src < 0 || static_cast<PortId>(src) >= num_ports) {
            parse_fail(prefix + "src out of range (expected 0.." + std::to_string(num_ports - 1) +
                       ", got " + std::to_string(src) + ")");
        }
        const std::int64_t dst = detail::require_int(entry, "dst", prefix);
        if (dst < 0 || static_cast<PortId>(dst) >= num_ports) {
            parse_fail(prefix + "dst out of range (expected 0.." + std::to_string(num_ports - 1) +
                       ", got " + std::to_string(dst) + ")");
        }
        t.src = static_cast<PortId>(src);
        t.dst = static_cast<PortId>(dst);
        t.p0_mw = detail::optional_number(entry, "p0_mw", 1.0, prefix);
        if (!(t.p0_mw > 0.0)) parse_fail(prefix + "p0_mw must be > 0");
        t.slot = detail::optional_int(entry, "slot", 0, prefix);
        if (t.slot < 0) parse_fail(prefix + "slot must be >= 0");
        config.traffic.push_back(t);
    }

    return config;
}

}  // namespace otdm
