#pragma once

// 2^k-port Banyan fabrics built from 2x2 routers. The canonical instance
// uses shuffle-exchange (Omega) wiring: every stage is preceded by the
// perfect shuffle of the k-bit link address, and destination-tag routing
// yields the unique path between any port pair.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "otdm/errors.hpp"

namespace otdm {

// External port or inter-stage link address, 0..2^k-1.
using PortId = std::uint32_t;

// Address arithmetic bound for build_banyan.
inline constexpr int kMaxStages = 24;

// Router coordinates: stage is 1-based counted from the input side, index
// is the 0-based position of the router within its stage.
struct NodeCoord {
    int stage = 0;
    PortId index = 0;

    friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

struct Hop {
    NodeCoord node;
    int exit_port = 0;  // 0 or 1

    friend bool operator==(const Hop&, const Hop&) = default;
};

// The unique src->dst route: exactly one hop per stage.
struct Lightpath {
    PortId src = 0;
    PortId dst = 0;
    std::vector<Hop> hops;

    int stage_count() const { return static_cast<int>(hops.size()); }

    friend bool operator==(const Lightpath&, const Lightpath&) = default;
};

// Permutation applied to link addresses at the input boundary of `stage`
// (1-based). Must be a bijection on 0..2^k-1 for every stage. Router y of
// a stage owns wired addresses 2y and 2y+1.
using WiringFn = std::function<PortId(int stage, PortId addr)>;

class NetworkTopology {
public:
    NetworkTopology(int stages, WiringFn wiring, std::string wiring_name)
        : stages_(stages), wiring_(std::move(wiring)), wiring_name_(std::move(wiring_name)) {
        if (stages_ < 1 || stages_ > 31) {
            throw InvalidParameterError("topology: stage count must be in 1..31, got " +
                                        std::to_string(stages_));
        }
        num_ports_ = PortId{1} << stages_;
    }

    int stages() const { return stages_; }
    PortId num_ports() const { return num_ports_; }
    PortId routers_per_stage() const { return num_ports_ >> 1; }
    const std::string& wiring_name() const { return wiring_name_; }

    bool contains(const NodeCoord& node) const {
        return node.stage >= 1 && node.stage <= stages_ && node.index < routers_per_stage();
    }

    // Link-address permutation ahead of `stage` (1-based).
    PortId wire(int stage, PortId addr) const {
        if (stage < 1 || stage > stages_) {
            throw InvalidParameterError("wire: stage " + std::to_string(stage) +
                                        " out of range 1.." + std::to_string(stages_));
        }
        if (addr >= num_ports_) {
            throw InvalidParameterError("wire: link address " + std::to_string(addr) +
                                        " out of range");
        }
        return wiring_(stage, addr);
    }

    // Destination-tag routing: the exit port taken at stage i is bit (k-i)
    // of dst, most significant bit first. Pure and total on in-range ports.
    Lightpath route(PortId src, PortId dst) const {
        if (src >= num_ports_) {
            throw InvalidParameterError("route: src " + std::to_string(src) +
                                        " out of range 0.." + std::to_string(num_ports_ - 1));
        }
        if (dst >= num_ports_) {
            throw InvalidParameterError("route: dst " + std::to_string(dst) +
                                        " out of range 0.." + std::to_string(num_ports_ - 1));
        }
        Lightpath path{src, dst, {}};
        path.hops.reserve(static_cast<std::size_t>(stages_));
        PortId addr = src;
        for (int stage = 1; stage <= stages_; ++stage) {
            const PortId wired = wiring_(stage, addr);
            const PortId router = wired >> 1;
            const int exit = static_cast<int>((dst >> (stages_ - stage)) & 1u);
            path.hops.push_back(Hop{NodeCoord{stage, router}, exit});
            addr = (router << 1) | static_cast<PortId>(exit);
        }
        if (addr != dst) {
            // Only reachable with a plugged-in wiring that does not admit
            // destination-tag routing.
            throw Error("wiring-mismatch",
                        "route: destination-tag routing does not terminate at dst " +
                            std::to_string(dst) + " under wiring '" + wiring_name_ + "'");
        }
        return path;
    }

private:
    int stages_;
    PortId num_ports_;
    WiringFn wiring_;
    std::string wiring_name_;
};

// Perfect shuffle: left rotation of the k-bit link address, applied ahead
// of every stage. This is the Omega-network wiring.
inline WiringFn perfect_shuffle_wiring(int stages) {
    const PortId mask = (PortId{1} << stages) - 1;
    return [stages, mask](int /*stage*/, PortId addr) -> PortId {
        return ((addr << 1) | (addr >> (stages - 1))) & mask;
    };
}

// Canonical 2^k-port Banyan fabric: k stages of 2^(k-1) routers with
// shuffle-exchange wiring. The unique-path property holds for every
// (src, dst) pair.
inline NetworkTopology build_banyan(int stages, int max_stages = kMaxStages) {
    if (max_stages < 1 || max_stages > 31) {
        throw InvalidParameterError("build_banyan: max_stages must be in 1..31, got " +
                                    std::to_string(max_stages));
    }
    if (stages < 1 || stages > max_stages) {
        throw InvalidParameterError("build_banyan: stage count must be in 1.." +
                                    std::to_string(max_stages) + ", got " +
                                    std::to_string(stages));
    }
    return NetworkTopology(stages, perfect_shuffle_wiring(stages), "shuffle-exchange");
}

}  // namespace otdm
