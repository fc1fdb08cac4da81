#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <unordered_set>

#include "ftsim/errors.hpp"
#include "ftsim/replication.hpp"

using namespace ftsim;

TEST_CASE("required_instances implements the replication bounds") {
    CHECK(required_instances({FailureMode::none, 0}) == 1);
    CHECK(required_instances({FailureMode::crash, 0}) == 1);
    CHECK(required_instances({FailureMode::crash, 1}) == 2);
    CHECK(required_instances({FailureMode::crash, 3}) == 4);
    CHECK(required_instances({FailureMode::byzantine, 0}) == 1);
    CHECK(required_instances({FailureMode::byzantine, 1}) == 3);
    CHECK(required_instances({FailureMode::byzantine, 2}) == 5);
}

TEST_CASE("placement keeps replicas of one entity on distinct LPs") {
    for (std::uint64_t n = 1; n <= 6; ++n) {
        for (std::uint32_t m = 1; m <= 4; ++m) {
            for (std::uint32_t l = m; l <= 6; ++l) {
                CAPTURE(n);
                CAPTURE(m);
                CAPTURE(l);
                const PlacementMap map = place_instances(n, m, l);
                for (std::uint64_t e = 0; e < n; ++e) {
                    std::set<LpId> hosts;
                    for (std::uint32_t j = 0; j < m; ++j)
                        hosts.insert(map.lp_of(
                            {static_cast<EntityId>(e),
                             static_cast<std::uint16_t>(j)}));
                    REQUIRE(hosts.size() == m);
                }
            }
        }
    }
}

TEST_CASE("placement load is balanced round-robin") {
    for (std::uint64_t n : {1ULL, 2ULL, 5ULL, 17ULL, 100ULL}) {
        for (std::uint32_t m = 1; m <= 4; ++m) {
            for (std::uint32_t l = m; l <= 7; ++l) {
                const PlacementMap map = place_instances(n, m, l);
                std::uint64_t lo = ~0ULL, hi = 0;
                for (std::uint32_t lp = 0; lp < l; ++lp) {
                    const std::uint64_t c =
                        map.count_on(static_cast<LpId>(lp));
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                }
                const std::uint64_t total = n * m;
                const std::uint64_t allowed =
                    (total % l == 0) ? 0 : 1;
                CHECK(hi - lo <= allowed);
            }
        }
    }
}

TEST_CASE("N=2 M=2 L=3: constraint holds and no LP exceeds the ceiling") {
    const PlacementMap map = place_instances(2, 2, 3);
    CHECK(map.lp_of({0, 0}) != map.lp_of({0, 1}));
    CHECK(map.lp_of({1, 0}) != map.lp_of({1, 1}));
    for (LpId lp = 0; lp < 3; ++lp) CHECK(map.count_on(lp) <= 2);
}

TEST_CASE("infeasible placement throws") {
    CHECK_THROWS_AS(place_instances(10, 3, 2), PlacementError);
    CHECK_THROWS_AS(place_instances(1, 2, 1), PlacementError);
}

TEST_CASE("placement is deterministic") {
    const PlacementMap a = place_instances(50, 3, 7);
    const PlacementMap b = place_instances(50, 3, 7);
    CHECK(a == b);
}

TEST_CASE("seed_for ignores the replica and separates entities") {
    // Replica-independence is structural (no replica argument exists);
    // what needs checking is entity separation and global-seed dependence.
    std::unordered_set<std::uint64_t> seen;
    for (EntityId e = 0; e < 10000; ++e)
        seen.insert(seed_for(42, e));
    CHECK(seen.size() == 10000);

    int differs = 0;
    for (EntityId e = 0; e < 1000; ++e)
        if (seed_for(42, e) != seed_for(43, e)) ++differs;
    CHECK(differs == 1000);
}

TEST_CASE("fan_out emits one copy per destination replica") {
    Envelope logical;
    logical.src = {4, 2};
    logical.dst = {11, 0};
    logical.send_step = 9;
    logical.delivery_step = 12;
    logical.seq = 5;
    logical.payload = {0xde, 0xad};

    const auto copies = fan_out(logical, 3);
    REQUIRE(copies.size() == 3);
    for (std::uint16_t j = 0; j < 3; ++j) {
        CHECK(copies[j].dst.replica == j);
        CHECK(copies[j].dst.entity == 11);
        CHECK(copies[j].logical_id() == logical.logical_id());
        CHECK(copies[j].payload == logical.payload);
        CHECK(copies[j].delivery_step == 12);
    }

    CHECK(fan_out(logical, 1).size() == 1);
}

TEST_CASE("placement map rejects out-of-range lookups") {
    PlacementMap map = place_instances(3, 2, 4);
    CHECK_THROWS_AS(map.lp_of({3, 0}), PlacementError);
    CHECK_THROWS_AS(map.lp_of({0, 2}), PlacementError);
    CHECK_THROWS_AS(map.set_lp({0, 0}, 4), PlacementError);
    CHECK(map.entity_has_instance_on(0, map.lp_of({0, 1})));
}
