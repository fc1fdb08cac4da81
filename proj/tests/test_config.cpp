#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftsim/config.hpp"
#include "ftsim/errors.hpp"

using namespace ftsim;

TEST_CASE("defaults are sane and validate cleanly") {
    SimConfig cfg;
    CHECK(cfg.num_lps == 4);
    CHECK(cfg.num_entities == 100);
    CHECK(cfg.policy.mode == FailureMode::none);
    CHECK(cfg.total_timesteps == 10000);
    CHECK(cfg.seed == 1);
    CHECK(cfg.exec_mode == ExecMode::single);
    CHECK(!cfg.migration_enabled);
    CHECK(cfg.replication_degree() == 1);
    CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("replication degree follows the failure policy") {
    SimConfig cfg;
    cfg.policy = {FailureMode::none, 0};
    CHECK(cfg.replication_degree() == 1);
    cfg.policy = {FailureMode::crash, 1};
    CHECK(cfg.replication_degree() == 2);
    cfg.policy = {FailureMode::crash, 3};
    CHECK(cfg.replication_degree() == 4);
    cfg.policy = {FailureMode::byzantine, 1};
    CHECK(cfg.replication_degree() == 3);
    cfg.policy = {FailureMode::byzantine, 2};
    CHECK(cfg.replication_degree() == 5);
}

TEST_CASE("effective instance cap defaults to twice the balanced load") {
    SimConfig cfg;
    cfg.num_entities = 100;
    cfg.num_lps = 4;
    cfg.policy = {FailureMode::crash, 1};
    CHECK(cfg.instance_cap_effective() == 100); // ceil(2*200/4)
    cfg.num_lps = 3;
    CHECK(cfg.instance_cap_effective() == 134); // ceil(400/3)
    cfg.lp_instance_cap = 70;
    CHECK(cfg.instance_cap_effective() == 70);
}

TEST_CASE("config text parses keys, comments and blank lines") {
    auto cfg = parse_config(
        "# benchmark setup\n"
        "num-lps = 8\n"
        "num-entities=1000\n"
        "\n"
        "policy=byzantine\n"
        "f=1\n"
        "total-timesteps=500   # short run\n"
        "seed=42\n"
        "exec-mode=threads\n"
        "migration-enabled=true\n"
        "migration-period=25\n"
        "migration-threshold=0.7\n"
        "quorum-grace=8\n"
        "out-degree=6\n"
        "ping-period=5\n"
        "p-neighbor=0.9\n"
        "latency-mu=1.5\n"
        "latency-sigma=0.25\n"
        "neighbor-update-period=50\n"
        "crash=3@100\n"
        "byzantine=1@0:flip-payload\n");
    CHECK(cfg.num_lps == 8);
    CHECK(cfg.num_entities == 1000);
    CHECK(cfg.policy.mode == FailureMode::byzantine);
    CHECK(cfg.policy.f == 1);
    CHECK(cfg.total_timesteps == 500);
    CHECK(cfg.seed == 42);
    CHECK(cfg.exec_mode == ExecMode::threads);
    CHECK(cfg.migration_enabled);
    CHECK(cfg.migration_period == 25);
    CHECK(cfg.migration_threshold == doctest::Approx(0.7));
    CHECK(cfg.quorum_grace == 8);
    CHECK(cfg.p2p.out_degree == 6);
    CHECK(cfg.p2p.ping_period == 5);
    CHECK(cfg.p2p.p_neighbor == doctest::Approx(0.9));
    CHECK(cfg.p2p.latency_mu == doctest::Approx(1.5));
    CHECK(cfg.p2p.latency_sigma == doctest::Approx(0.25));
    CHECK(cfg.p2p.neighbor_update_period == 50);
    REQUIRE(cfg.faults.crashes.size() == 1);
    CHECK(cfg.faults.crashes[0].lp == 3);
    CHECK(cfg.faults.crashes[0].at_step == 100);
    REQUIRE(cfg.faults.byzantine.size() == 1);
    CHECK(cfg.faults.byzantine[0].lp == 1);
    CHECK(cfg.faults.byzantine[0].from_step == 0);
    CHECK(cfg.faults.byzantine[0].mode == CorruptionMode::flip_payload);
    CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("byzantine fault mode defaults to flip-payload") {
    auto cfg = parse_config("byzantine=0@10\n");
    REQUIRE(cfg.faults.byzantine.size() == 1);
    CHECK(cfg.faults.byzantine[0].mode == CorruptionMode::flip_payload);
    CHECK(cfg.faults.byzantine[0].from_step == 10);
}

TEST_CASE("serialize/parse round-trips every field") {
    SimConfig cfg;
    cfg.num_lps = 6;
    cfg.num_entities = 321;
    cfg.policy = {FailureMode::crash, 2};
    cfg.total_timesteps = 777;
    cfg.seed = 987654321;
    cfg.exec_mode = ExecMode::threads;
    cfg.migration_enabled = true;
    cfg.migration_period = 40;
    cfg.migration_threshold = 0.55;
    cfg.lp_instance_cap = 500;
    cfg.quorum_grace = 3;
    cfg.p2p.out_degree = 9;
    cfg.p2p.ping_period = 7;
    cfg.p2p.p_neighbor = 0.25;
    cfg.p2p.latency_mu = 2.0;
    cfg.p2p.latency_sigma = 0.125;
    cfg.p2p.neighbor_update_period = 33;
    cfg.faults.crashes = {{0, 111}, {5, 222}};
    cfg.faults.byzantine = {{2, 4, CorruptionMode::garble_seq}};

    auto back = parse_config(serialize_config(cfg));
    CHECK(back.num_lps == cfg.num_lps);
    CHECK(back.num_entities == cfg.num_entities);
    CHECK(back.policy.mode == cfg.policy.mode);
    CHECK(back.policy.f == cfg.policy.f);
    CHECK(back.total_timesteps == cfg.total_timesteps);
    CHECK(back.seed == cfg.seed);
    CHECK(back.exec_mode == cfg.exec_mode);
    CHECK(back.migration_enabled == cfg.migration_enabled);
    CHECK(back.migration_period == cfg.migration_period);
    CHECK(back.migration_threshold == doctest::Approx(cfg.migration_threshold));
    CHECK(back.lp_instance_cap == cfg.lp_instance_cap);
    CHECK(back.quorum_grace == cfg.quorum_grace);
    CHECK(back.p2p.out_degree == cfg.p2p.out_degree);
    CHECK(back.p2p.ping_period == cfg.p2p.ping_period);
    CHECK(back.p2p.p_neighbor == doctest::Approx(cfg.p2p.p_neighbor));
    CHECK(back.p2p.latency_mu == doctest::Approx(cfg.p2p.latency_mu));
    CHECK(back.p2p.latency_sigma == doctest::Approx(cfg.p2p.latency_sigma));
    CHECK(back.p2p.neighbor_update_period == cfg.p2p.neighbor_update_period);
    REQUIRE(back.faults.crashes.size() == 2);
    CHECK(back.faults.crashes[1].lp == 5);
    CHECK(back.faults.crashes[1].at_step == 222);
    REQUIRE(back.faults.byzantine.size() == 1);
    CHECK(back.faults.byzantine[0].mode == CorruptionMode::garble_seq);

    // serializing the parsed copy reproduces the exact text
    CHECK(serialize_config(back) == serialize_config(cfg));
}

TEST_CASE("malformed input is rejected with context") {
    CHECK_THROWS_AS(parse_config("num-lps\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("num-lps=four\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("no-such-key=1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("crash=3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("byzantine=1@0:melt\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("policy=optimistic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("exec-mode=gpu\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("migration-enabled=maybe\n"), ConfigError);
}

TEST_CASE("validate rejects impossible setups") {
    SimConfig cfg;

    SUBCASE("byzantine f=1 needs three distinct LPs") {
        cfg.policy = {FailureMode::byzantine, 1};
        cfg.num_lps = 2;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.num_lps = 3;
        CHECK_NOTHROW(validate(cfg));
    }

    SUBCASE("zero-sized dimensions") {
        cfg.num_lps = 0;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg = SimConfig{};
        cfg.num_entities = 0;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg = SimConfig{};
        cfg.total_timesteps = 0;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }

    SUBCASE("f without a failure mode") {
        cfg.policy = {FailureMode::none, 1};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }

    SUBCASE("threshold range") {
        cfg.migration_threshold = 1.5;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.migration_threshold = -0.1;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }

    SUBCASE("cap below the balanced minimum") {
        cfg.policy = {FailureMode::crash, 1};
        cfg.num_entities = 100;
        cfg.num_lps = 4;
        cfg.lp_instance_cap = 49; // need ceil(200/4) = 50
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.lp_instance_cap = 50;
        CHECK_NOTHROW(validate(cfg));
    }

    SUBCASE("overlay degree must leave a non-neighbor pool") {
        cfg.num_entities = 5;
        cfg.p2p.out_degree = 5;
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.p2p.out_degree = 4;
        CHECK_NOTHROW(validate(cfg));
    }

    SUBCASE("fault plan bounds") {
        cfg.faults.crashes = {{7, 10}};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.faults.crashes = {{0, 20000}};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.faults.crashes = {{0, 10000}}; // crash at the final barrier is legal
        CHECK_NOTHROW(validate(cfg));
        cfg.faults.crashes.clear();
        cfg.faults.byzantine = {{-1, 0, CorruptionMode::drop_all}};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }

    SUBCASE("endpoints must cover every LP in process mode") {
        cfg.exec_mode = ExecMode::processes;
        cfg.endpoints = {"127.0.0.1:9000"};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
        cfg.endpoints = {"a:1", "b:2", "c:3", "d:4"};
        CHECK_NOTHROW(validate(cfg));
        cfg.endpoints.clear();
        CHECK_NOTHROW(validate(cfg));
    }
}

TEST_CASE("config files load from disk") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.conf"), ConfigError);
}
