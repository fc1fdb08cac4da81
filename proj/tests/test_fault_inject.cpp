#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftsim/errors.hpp"
#include "ftsim/fault_inject.hpp"

using namespace ftsim;

namespace {

Envelope sample_envelope() {
    Envelope e;
    e.src = {3, 1};
    e.dst = {7, 0};
    e.send_step = 10;
    e.delivery_step = 11;
    e.seq = 42;
    e.payload = {0x00, 0x01, 0xA5, 0xFF};
    return e;
}

} // namespace

TEST_CASE("flip-payload XORs every byte with the fixed mask") {
    auto out = corrupt(sample_envelope(), CorruptionMode::flip_payload);
    REQUIRE(out.size() == 1);
    CHECK(out[0].payload == Bytes{0xA5, 0xA4, 0x00, 0x5A});
    CHECK(out[0].seq == 42);
    CHECK(out[0].delivery_step == 11);
    CHECK(out[0].src == sample_envelope().src);
}

TEST_CASE("flip-payload on an empty payload is a no-op copy") {
    auto e = sample_envelope();
    e.payload.clear();
    auto out = corrupt(e, CorruptionMode::flip_payload);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == e);
}

TEST_CASE("flipping twice restores the original payload") {
    auto once = corrupt(sample_envelope(), CorruptionMode::flip_payload);
    auto twice = corrupt(once[0], CorruptionMode::flip_payload);
    CHECK(twice[0] == sample_envelope());
}

TEST_CASE("drop-all swallows the copy") {
    CHECK(corrupt(sample_envelope(), CorruptionMode::drop_all).empty());
}

TEST_CASE("duplicate emits two identical copies") {
    auto out = corrupt(sample_envelope(), CorruptionMode::duplicate);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == sample_envelope());
    CHECK(out[1] == out[0]);
    CHECK(out[0].delivery_step == out[1].delivery_step);
}

TEST_CASE("garble-seq shifts only the sequence number") {
    auto out = corrupt(sample_envelope(), CorruptionMode::garble_seq);
    REQUIRE(out.size() == 1);
    CHECK(out[0].seq == 43);
    CHECK(out[0].payload == sample_envelope().payload);
    CHECK(out[0].delivery_step == 11);
}

TEST_CASE("corruption is deterministic") {
    for (auto mode : {CorruptionMode::flip_payload, CorruptionMode::drop_all,
                      CorruptionMode::duplicate, CorruptionMode::garble_seq}) {
        CHECK(corrupt(sample_envelope(), mode) ==
              corrupt(sample_envelope(), mode));
    }
}

TEST_CASE("schedule reports crashes at their step, sorted by LP") {
    FaultPlan plan;
    plan.crashes = {{3, 100}, {1, 100}, {2, 200}};
    FaultSchedule sched(plan);

    CHECK(sched.crashes_at(99).empty());
    CHECK(sched.crashes_at(100) == std::vector<LpId>{1, 3});
    CHECK(sched.crashes_at(200) == std::vector<LpId>{2});
    CHECK(sched.crashes_at(201).empty());
}

TEST_CASE("schedule activates corruption from its start step onward") {
    FaultPlan plan;
    plan.byzantine = {{2, 50, CorruptionMode::flip_payload}};
    FaultSchedule sched(plan);

    CHECK(!sched.corruption_for(2, 49).has_value());
    REQUIRE(sched.corruption_for(2, 50).has_value());
    CHECK(*sched.corruption_for(2, 50) == CorruptionMode::flip_payload);
    CHECK(sched.corruption_for(2, 5000).has_value());
    CHECK(!sched.corruption_for(1, 50).has_value());
}

TEST_CASE("an LP may appear at most once across the whole plan") {
    FaultPlan same_list;
    same_list.crashes = {{1, 10}, {1, 20}};
    CHECK_THROWS_AS(FaultSchedule{same_list}, ConfigError);

    FaultPlan byz_twice;
    byz_twice.byzantine = {{0, 0, CorruptionMode::flip_payload},
                            {0, 5, CorruptionMode::drop_all}};
    CHECK_THROWS_AS(FaultSchedule{byz_twice}, ConfigError);

    FaultPlan cross;
    cross.crashes = {{2, 10}};
    cross.byzantine = {{2, 0, CorruptionMode::duplicate}};
    CHECK_THROWS_AS(FaultSchedule{cross}, ConfigError);

    FaultPlan ok;
    ok.crashes = {{0, 10}};
    ok.byzantine = {{1, 0, CorruptionMode::garble_seq}};
    CHECK_NOTHROW(FaultSchedule{ok});
}

TEST_CASE("corruption mode names round-trip") {
    for (auto mode : {CorruptionMode::flip_payload, CorruptionMode::drop_all,
                      CorruptionMode::duplicate, CorruptionMode::garble_seq}) {
        CHECK(corruption_mode_from_string(to_string(mode)) == mode);
    }
    CHECK_THROWS_AS(corruption_mode_from_string("nonsense"), ConfigError);
}
