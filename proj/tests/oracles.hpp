#pragma once

// Test-only oracles, deliberately independent of the implementation paths
// they check: exhaustive path enumeration over the raw wiring, stage-by-
// stage cascade accumulation, per-router contribution sums and brute-force
// stage-count search.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "otdm/crosstalk.hpp"
#include "otdm/simulator.hpp"
#include "otdm/topology.hpp"

namespace oracles {

// Every src->dst path through the wiring graph, found by trying both exit
// ports at every stage. Knows nothing about destination-tag routing.
inline std::vector<std::vector<otdm::Hop>> enumerate_paths(const otdm::NetworkTopology& topo,
                                                           otdm::PortId src, otdm::PortId dst) {
    const int k = topo.stages();
    std::vector<std::vector<otdm::Hop>> found;
    std::vector<otdm::Hop> current;

    auto walk = [&](auto&& self, int stage, otdm::PortId addr) -> void {
        if (stage > k) {
            if (addr == dst) found.push_back(current);
            return;
        }
        const otdm::PortId wired = topo.wire(stage, addr);
        const otdm::PortId router = wired >> 1;
        for (int exit = 0; exit <= 1; ++exit) {
            current.push_back(otdm::Hop{otdm::NodeCoord{stage, router}, exit});
            self(self, stage + 1, (router << 1) | static_cast<otdm::PortId>(exit));
            current.pop_back();
        }
    };
    walk(walk, 1, src);
    return found;
}

// Replay a hop list against the raw wiring: checks the router indices and
// returns the port the exits actually land on.
inline std::optional<otdm::PortId> replay_path(const otdm::NetworkTopology& topo,
                                               const otdm::Lightpath& path) {
    otdm::PortId addr = path.src;
    for (const otdm::Hop& hop : path.hops) {
        const otdm::PortId wired = topo.wire(hop.node.stage, addr);
        if ((wired >> 1) != hop.node.index) return std::nullopt;
        addr = (hop.node.index << 1) | static_cast<otdm::PortId>(hop.exit_port);
    }
    return addr;
}

// Accumulated crosstalk from cascading the per-hop output power through
// `stages` routers and normalizing at the end (multiplicative route).
inline double cascade_crosstalk(const otdm::CrosstalkParams& params, int stages) {
    const double p0 = 1.0;
    double s = p0;
    for (int i = 0; i < stages; ++i) {
        s = otdm::parallel_router_output(s, params);
    }
    return otdm::normalized_crosstalk(s, p0, /*slack_mw=*/0.0);
}

// Additive stage-by-stage accumulation: each contaminated stage adds one
// n*x_tot unit of the launch power.
inline double additive_cascade_crosstalk(const otdm::CrosstalkParams& params, int stages) {
    const double p0 = 1.0;
    double s = p0;
    for (int i = 0; i < stages; ++i) {
        for (int r = 0; r < params.parallel_degree(); ++r) {
            s += p0 * (params.x_inter() + params.x_intra());
        }
    }
    return otdm::normalized_crosstalk(s, p0, /*slack_mw=*/0.0);
}

// Output of n parallel routers as the sum of per-router contributions.
inline double summed_router_output(double p_in, const otdm::CrosstalkParams& params) {
    double total = p_in;
    for (int r = 0; r < params.parallel_degree(); ++r) {
        total += p_in * (params.x_inter() + params.x_intra());
    }
    return total;
}

// Brute-force stage count: the N in [0, max_n] whose series crosstalk is
// closest to the measurement.
inline int brute_force_stage_count(double x_meas, const otdm::CrosstalkParams& params,
                                   int max_n = 64) {
    int best = 0;
    double best_err = std::abs(otdm::series_crosstalk(params, 0) - x_meas);
    for (int n = 1; n <= max_n; ++n) {
        const double err = std::abs(otdm::series_crosstalk(params, n) - x_meas);
        if (err < best_err) {
            best_err = err;
            best = n;
        }
    }
    return best;
}

// Independent scan for the number of contaminated stages on a path.
inline int contaminated_stage_count(const otdm::Lightpath& path,
                                    const std::vector<otdm::FaultSpec>& faults) {
    const int k = path.stage_count();
    for (const otdm::Hop& hop : path.hops) {
        for (const otdm::FaultSpec& fault : faults) {
            if (fault.node == hop.node) return k - hop.node.stage + 1;
        }
    }
    return 0;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

}  // namespace oracles
