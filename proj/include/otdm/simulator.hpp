#pragma once

// Discrete slotted propagation of packets through a Banyan fabric. One
// stage per slot; every router has a single-packet buffer that absorbs the
// loser of an exit-port contention. Crosstalk contamination starts at an
// injected fault router and covers every downstream hop of the path.
//
// Slot semantics (all deterministic):
//   - A packet injected at slot t attempts stage 1 during slot t+1 and,
//     absent buffering, exits stage k during slot t+k (its delivery slot).
//   - When several packets at one router want the same exit port in the
//     same slot, the lowest router-local input port wins; on equal port
//     numbers the buffered packet beats the fresh arrival, then lower
//     packet id. A buffered packet keeps the input port it arrived on.
//   - A fresh loser enters the router's buffer if that buffer was empty at
//     the start of the slot; otherwise it is dropped, even if the occupant
//     departs in the same slot. A buffered loser simply stays put; every
//     slot spent waiting counts as one buffering event.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "otdm/crosstalk.hpp"
#include "otdm/errors.hpp"
#include "otdm/topology.hpp"

namespace otdm {

struct Packet {
    std::uint64_t id = 0;
    PortId src = 0;
    PortId dst = 0;
    double p0_mw = 1.0;           // launch power
    std::int64_t slot_injected = 0;
};

// Router where anomalous crosstalk contamination originates. The fault
// contaminates its own router and every later hop of any path through it.
struct FaultSpec {
    NodeCoord node;

    friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

struct TapMeasurement {
    std::uint64_t packet_id = 0;
    double p_in_mw = 0.0;             // provisioned launch power P0
    double s_out_mw = 0.0;            // measured power at the destination tap
    Lightpath path;
    std::int64_t slot_delivered = 0;
    std::int64_t buffering_events = 0;  // slots this packet spent buffered

    friend bool operator==(const TapMeasurement&, const TapMeasurement&) = default;
};

struct SimulationResult {
    std::vector<TapMeasurement> taps;      // ordered by (slot_delivered, packet id)
    std::int64_t buffered_events = 0;      // total over all packets, dropped ones included
    std::vector<std::uint64_t> dropped;
    std::int64_t slots_elapsed = 0;        // last slot with fabric activity

    friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

// Destination power of one packet. Routers ahead of the fault contribute
// nothing; the fault router and every subsequent hop each contribute one
// per-stage unit, compounded or added per the accumulation mode. A fault
// that is absent or off the path leaves the signal at exactly p0.
inline double propagate(const NetworkTopology& topo, const Lightpath& path, double p0_mw,
                        const CrosstalkParams& params,
                        const std::optional<FaultSpec>& fault = std::nullopt) {
    if (!(p0_mw > 0.0)) {
        throw InvalidParameterError("propagate: launch power must be > 0 mW, got " +
                                    std::to_string(p0_mw));
    }
    if (path.stage_count() != topo.stages()) {
        throw InvalidParameterError("propagate: path has " + std::to_string(path.stage_count()) +
                                    " hops, fabric has " + std::to_string(topo.stages()) +
                                    " stages");
    }
    if (fault && !topo.contains(fault->node)) {
        throw InvalidParameterError("propagate: fault node (" + std::to_string(fault->node.stage) +
                                    ", " + std::to_string(fault->node.index) +
                                    ") lies outside the fabric");
    }
    int contaminated = 0;
    if (fault) {
        for (const Hop& hop : path.hops) {
            if (hop.node == fault->node) {
                contaminated = topo.stages() - hop.node.stage + 1;
                break;
            }
        }
    }
    if (contaminated == 0) return p0_mw;
    if (params.mode() == AccumulationMode::linear) {
        return p0_mw * (1.0 + static_cast<double>(contaminated) * params.unit());
    }
    return p0_mw * std::pow(1.0 + params.unit(), contaminated);
}

namespace detail {

// Earliest on-path fault governs contamination; overlapping faults do not
// stack.
inline std::optional<FaultSpec> earliest_on_path_fault(const Lightpath& path,
                                                       const std::vector<FaultSpec>& faults) {
    for (const Hop& hop : path.hops) {
        for (const FaultSpec& fault : faults) {
            if (fault.node == hop.node) return fault;
        }
    }
    return std::nullopt;
}

}  // namespace detail

inline SimulationResult simulate_slots(const NetworkTopology& topo,
                                       const std::vector<Packet>& traffic,
                                       const CrosstalkParams& params,
                                       const std::vector<FaultSpec>& faults = {}) {
    if (traffic.empty()) {
        throw InvalidParameterError("simulate_slots: traffic must not be empty");
    }
    for (const FaultSpec& fault : faults) {
        if (!topo.contains(fault.node)) {
            throw InvalidParameterError("simulate_slots: fault node (" +
                                        std::to_string(fault.node.stage) + ", " +
                                        std::to_string(fault.node.index) +
                                        ") lies outside the fabric");
        }
    }
    {
        std::vector<std::uint64_t> ids;
        ids.reserve(traffic.size());
        for (const Packet& p : traffic) ids.push_back(p.id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
            throw InvalidParameterError("simulate_slots: packet ids must be unique");
        }
    }

    const int k = topo.stages();

    struct Flight {
        const Packet* pkt = nullptr;
        Lightpath path;
        double s_out = 0.0;          // destination power, fixed by the fault model
        int next_stage = 1;          // stage this packet attempts next
        PortId addr = 0;             // link address at next_stage's input boundary
        bool in_buffer = false;
        int input_port = 0;          // frozen router-local port while buffered
        std::int64_t bufferings = 0;
        bool done = false;
    };

    std::vector<Flight> flights;
    flights.reserve(traffic.size());
    for (const Packet& p : traffic) {
        if (p.slot_injected < 0) {
            throw InvalidParameterError("simulate_slots: packet " + std::to_string(p.id) +
                                        " has negative injection slot");
        }
        Flight f;
        f.pkt = &p;
        f.path = topo.route(p.src, p.dst);
        f.s_out = propagate(topo, f.path, p.p0_mw, params,
                            detail::earliest_on_path_fault(f.path, faults));
        f.addr = p.src;
        flights.push_back(std::move(f));
    }

    // Activation order: by injection slot, ties in traffic order.
    std::vector<std::size_t> activation(flights.size());
    for (std::size_t i = 0; i < activation.size(); ++i) activation[i] = i;
    std::stable_sort(activation.begin(), activation.end(), [&](std::size_t a, std::size_t b) {
        return flights[a].pkt->slot_injected < flights[b].pkt->slot_injected;
    });

    using RouterKey = std::pair<int, PortId>;  // (stage, router index)
    std::map<RouterKey, std::size_t> buffers;  // occupant flight per router

    struct Attempt {
        std::size_t flight;
        int exit_port;
        int input_port;
        bool buffered;
    };

    SimulationResult result;
    std::vector<std::size_t> active;
    std::size_t next_activation = 0;
    std::int64_t slot = flights[activation[0]].pkt->slot_injected;

    while (next_activation < activation.size() || !active.empty()) {
        ++slot;
        if (active.empty()) {
            // Fabric idle: jump to the next injection.
            slot = std::max(slot, flights[activation[next_activation]].pkt->slot_injected + 1);
        }
        while (next_activation < activation.size() &&
               flights[activation[next_activation]].pkt->slot_injected < slot) {
            active.push_back(activation[next_activation++]);
        }

        std::map<RouterKey, std::vector<Attempt>> routers;
        for (std::size_t idx : active) {
            Flight& f = flights[idx];
            const Hop& hop = f.path.hops[static_cast<std::size_t>(f.next_stage - 1)];
            const int input_port = f.in_buffer
                                       ? f.input_port
                                       : static_cast<int>(topo.wire(f.next_stage, f.addr) & 1u);
            routers[{hop.node.stage, hop.node.index}].push_back(
                Attempt{idx, hop.exit_port, input_port, f.in_buffer});
        }

        std::vector<std::size_t> delivered_this_slot;
        std::vector<std::size_t> dropped_this_slot;
        std::vector<std::pair<RouterKey, std::size_t>> enter_buffer;
        std::vector<RouterKey> leave_buffer;

        for (auto& [router, attempts] : routers) {
            std::sort(attempts.begin(), attempts.end(), [&](const Attempt& a, const Attempt& b) {
                if (a.input_port != b.input_port) return a.input_port < b.input_port;
                if (a.buffered != b.buffered) return a.buffered;
                return flights[a.flight].pkt->id < flights[b.flight].pkt->id;
            });
            const bool occupied_at_start = buffers.count(router) > 0;
            bool claimed_this_slot = false;
            for (int exit = 0; exit <= 1; ++exit) {
                bool exit_taken = false;
                for (const Attempt& attempt : attempts) {
                    if (attempt.exit_port != exit) continue;
                    Flight& f = flights[attempt.flight];
                    if (!exit_taken) {
                        exit_taken = true;
                        if (f.in_buffer) {
                            f.in_buffer = false;
                            leave_buffer.push_back(router);
                        }
                        f.addr = (router.second << 1) | static_cast<PortId>(exit);
                        ++f.next_stage;
                        if (f.next_stage > k) {
                            f.done = true;
                            delivered_this_slot.push_back(attempt.flight);
                        }
                    } else if (f.in_buffer) {
                        // Stays in the buffer one more slot.
                        ++f.bufferings;
                        ++result.buffered_events;
                    } else if (occupied_at_start || claimed_this_slot) {
                        f.done = true;
                        dropped_this_slot.push_back(attempt.flight);
                    } else {
                        claimed_this_slot = true;
                        f.in_buffer = true;
                        f.input_port = attempt.input_port;
                        ++f.bufferings;
                        ++result.buffered_events;
                        enter_buffer.emplace_back(router, attempt.flight);
                    }
                }
            }
        }

        for (const RouterKey& router : leave_buffer) buffers.erase(router);
        for (const auto& [router, idx] : enter_buffer) buffers[router] = idx;

        auto by_id = [&](std::size_t a, std::size_t b) {
            return flights[a].pkt->id < flights[b].pkt->id;
        };
        std::sort(delivered_this_slot.begin(), delivered_this_slot.end(), by_id);
        for (std::size_t idx : delivered_this_slot) {
            Flight& f = flights[idx];
            result.taps.push_back(TapMeasurement{f.pkt->id, f.pkt->p0_mw, f.s_out,
                                                 std::move(f.path), slot, f.bufferings});
        }
        std::sort(dropped_this_slot.begin(), dropped_this_slot.end(), by_id);
        for (std::size_t idx : dropped_this_slot) {
            result.dropped.push_back(flights[idx].pkt->id);
        }

        std::erase_if(active, [&](std::size_t idx) { return flights[idx].done; });
        result.slots_elapsed = slot;
    }

    return result;
}

// Scales every tap's measured power by 1 + U(-noise_r, noise_r), the
// zero-mean relative measurement noise of the destination photodetector.
// Deterministic for a fixed seed. Stage counting stays exact as long as
// tol >= 2 * noise_r / (n * x_tot) holds for the downstream tolerance.
inline void apply_relative_noise(SimulationResult& result, double noise_r, std::uint64_t seed) {
    if (!(noise_r >= 0.0) || noise_r >= 1.0) {
        throw InvalidParameterError("apply_relative_noise: noise ratio must be in [0, 1), got " +
                                    std::to_string(noise_r));
    }
    if (noise_r == 0.0) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-noise_r, noise_r);
    for (TapMeasurement& tap : result.taps) {
        tap.s_out_mw *= 1.0 + dist(rng);
    }
}

}  // namespace otdm
