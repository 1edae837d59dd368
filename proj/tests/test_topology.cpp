#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "otdm/topology.hpp"
#include "oracles.hpp"

using namespace otdm;

TEST_CASE("build_banyan sizes the fabric from the stage count") {
    const NetworkTopology k3 = build_banyan(3);
    CHECK(k3.stages() == 3);
    CHECK(k3.num_ports() == 8);
    CHECK(k3.routers_per_stage() == 4);

    const NetworkTopology k1 = build_banyan(1);
    CHECK(k1.num_ports() == 2);
    CHECK(k1.routers_per_stage() == 1);

    const NetworkTopology k5 = build_banyan(5);
    CHECK(k5.num_ports() == 32);
    CHECK(k5.routers_per_stage() == 16);
}

TEST_CASE("build_banyan rejects out-of-range stage counts") {
    CHECK_THROWS_AS(build_banyan(0), InvalidParameterError);
    CHECK_THROWS_AS(build_banyan(-2), InvalidParameterError);
    CHECK_THROWS_AS(build_banyan(kMaxStages + 1), InvalidParameterError);
    CHECK_NOTHROW(build_banyan(kMaxStages + 1, 31));
}

TEST_CASE("stage wiring is a bijection on link addresses") {
    for (int k = 1; k <= 6; ++k) {
        const NetworkTopology topo = build_banyan(k);
        for (int stage = 1; stage <= k; ++stage) {
            std::set<PortId> image;
            for (PortId addr = 0; addr < topo.num_ports(); ++addr) {
                const PortId wired = topo.wire(stage, addr);
                CHECK(wired < topo.num_ports());
                image.insert(wired);
            }
            CHECK(image.size() == topo.num_ports());
        }
    }
}

TEST_CASE("route follows the destination tag through the shuffle") {
    const NetworkTopology topo = build_banyan(3);

    SECTION("all-zero address is a fixed point") {
        const Lightpath path = topo.route(0, 0);
        REQUIRE(path.hops.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(path.hops[i].node.stage == i + 1);
            CHECK(path.hops[i].node.index == 0);
            CHECK(path.hops[i].exit_port == 0);
        }
    }

    SECTION("0 -> 5 crosses routers 0, 1, 2") {
        const Lightpath path = topo.route(0, 5);
        REQUIRE(path.hops.size() == 3);
        CHECK(path.hops[0].node == NodeCoord{1, 0});
        CHECK(path.hops[1].node == NodeCoord{2, 1});
        CHECK(path.hops[2].node == NodeCoord{3, 2});
        CHECK(path.hops[0].exit_port == 1);
        CHECK(path.hops[1].exit_port == 0);
        CHECK(path.hops[2].exit_port == 1);
    }

    SECTION("7 -> 7 stays on the bottom routers") {
        const Lightpath path = topo.route(7, 7);
        REQUIRE(path.hops.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(path.hops[i].node == NodeCoord{i + 1, 3});
            CHECK(path.hops[i].exit_port == 1);
        }
    }
}

TEST_CASE("route rejects out-of-range ports") {
    const NetworkTopology topo = build_banyan(3);
    CHECK_THROWS_AS(topo.route(8, 0), InvalidParameterError);
    CHECK_THROWS_AS(topo.route(0, 8), InvalidParameterError);
}

TEST_CASE("exhaustive search finds exactly one path per pair, and it is route's") {
    for (int k = 1; k <= 5; ++k) {
        const NetworkTopology topo = build_banyan(k);
        for (PortId src = 0; src < topo.num_ports(); ++src) {
            for (PortId dst = 0; dst < topo.num_ports(); ++dst) {
                const auto paths = oracles::enumerate_paths(topo, src, dst);
                REQUIRE(paths.size() == 1);
                REQUIRE(topo.route(src, dst).hops == paths.front());
            }
        }
    }
}

TEST_CASE("replaying route's exits through the wiring lands on dst") {
    SECTION("exhaustive for small fabrics") {
        for (int k = 1; k <= 6; ++k) {
            const NetworkTopology topo = build_banyan(k);
            for (PortId src = 0; src < topo.num_ports(); ++src) {
                for (PortId dst = 0; dst < topo.num_ports(); ++dst) {
                    const auto landed = oracles::replay_path(topo, topo.route(src, dst));
                    REQUIRE(landed.has_value());
                    REQUIRE(*landed == dst);
                }
            }
        }
    }

    SECTION("sampled for larger fabrics") {
        std::mt19937 rng(20260810);
        for (int k = 7; k <= 10; ++k) {
            const NetworkTopology topo = build_banyan(k);
            std::uniform_int_distribution<PortId> port(0, topo.num_ports() - 1);
            for (int trial = 0; trial < 500; ++trial) {
                const PortId src = port(rng);
                const PortId dst = port(rng);
                const Lightpath path = topo.route(src, dst);
                REQUIRE(path.stage_count() == k);
                const auto landed = oracles::replay_path(topo, path);
                REQUIRE(landed.has_value());
                REQUIRE(*landed == dst);
            }
        }
    }
}

TEST_CASE("route is deterministic") {
    const NetworkTopology topo = build_banyan(5);
    for (PortId src = 0; src < topo.num_ports(); src += 3) {
        for (PortId dst = 0; dst < topo.num_ports(); dst += 5) {
            CHECK(topo.route(src, dst) == topo.route(src, dst));
        }
    }
}

TEST_CASE("a plugged-in wiring is honored end to end") {
    // Identity wiring admits destination-tag routing only for destinations
    // whose leading bits match the source; other pairs must fail loudly
    // instead of landing on the wrong port.
    const NetworkTopology topo(2, [](int, PortId addr) { return addr; }, "identity");
    CHECK(topo.wiring_name() == "identity");
    CHECK(topo.wire(1, 3) == 3);

    const Lightpath reachable = topo.route(0, 1);
    CHECK(reachable.hops[0].node == NodeCoord{1, 0});
    CHECK(reachable.hops[1].node == NodeCoord{2, 0});

    CHECK_THROWS_AS(topo.route(0, 2), Error);
}
