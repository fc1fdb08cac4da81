#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftsim/types.hpp"

namespace ftsim {

enum class CorruptionMode {
    flip_payload,
    drop_all,
    duplicate,
    garble_seq,
};

const char* to_string(CorruptionMode m);
CorruptionMode corruption_mode_from_string(const std::string& s);

struct CrashFault {
    LpId lp = 0;
    Timestep at_step = 0;
};

struct ByzantineFault {
    LpId lp = 0;
    Timestep from_step = 0;
    CorruptionMode mode = CorruptionMode::flip_payload;
};

struct FaultPlan {
    std::vector<CrashFault> crashes;
    std::vector<ByzantineFault> byzantine;

    bool empty() const { return crashes.empty() && byzantine.empty(); }
};

struct P2PModelConfig {
    std::uint32_t out_degree = 5;
    Timestep ping_period = 10;
    double p_neighbor = 0.8;
    double latency_mu = 0.8;
    double latency_sigma = 0.5;
    Timestep neighbor_update_period = 100;
};

enum class ExecMode { single, threads, processes };

const char* to_string(ExecMode m);
ExecMode exec_mode_from_string(const std::string& s);

struct SimConfig {
    std::uint32_t num_lps = 4;
    std::uint64_t num_entities = 100;
    ReplicationPolicy policy;
    Timestep total_timesteps = 10000;
    std::uint64_t seed = 1;
    ExecMode exec_mode = ExecMode::single;

    bool migration_enabled = false;
    Timestep migration_period = 50;
    double migration_threshold = 0.6;
    std::uint64_t lp_instance_cap = 0; // 0 = derive ceil(2*N*M/L)

    Timestep quorum_grace = 16;

    P2PModelConfig p2p;
    FaultPlan faults;

    std::uint16_t base_port = 0;
    std::vector<std::string> endpoints;

    bool check_replica_consistency = true;
    bool record_digest_streams = false;

    std::uint32_t replication_degree() const;
    std::uint64_t instance_cap_effective() const;
};

// Throws ConfigError with a message naming the offending field.
void validate(const SimConfig& cfg);

// Flat key=value configuration text: one pair per line, '#' comments.
// Fault entries use the forms
//   crash=LP@STEP
//   byzantine=LP@STEP:MODE
// and may repeat.
SimConfig parse_config(const std::string& text);
SimConfig parse_config_file(const std::string& path);
void apply_key(SimConfig& cfg, const std::string& key,
               const std::string& value);
std::string serialize_config(const SimConfig& cfg);

} // namespace ftsim
