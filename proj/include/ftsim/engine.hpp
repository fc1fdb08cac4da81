#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "ftsim/config.hpp"
#include "ftsim/model.hpp"
#include "ftsim/report.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

// Per-step state digest of every instance hosted on a live LP, recorded at
// the barrier after the step completes. Test hook for replica-consistency
// and migration-transparency properties.
struct DigestStreams {
    std::map<InstanceId, std::vector<std::uint64_t>> state;
};

// The benchmark model the CLI runs (and the only model available in
// process mode, where every worker must rebuild it from config alone).
std::unique_ptr<Model> make_model(const SimConfig& cfg);

// Runs the simulation in this process: exec modes single (round-robin over
// LPs, the determinism oracle) and threads (one thread per LP per step).
SimReport run_in_process(const SimConfig& cfg, Model& model,
                         DigestStreams* streams = nullptr);

// Dispatches on cfg.exec_mode; process mode forks one worker per LP.
SimReport run_simulation(const SimConfig& cfg);

} // namespace ftsim
