#pragma once

#include <string>

#include "ftsim/config.hpp"
#include "ftsim/report.hpp"

namespace ftsim {

// Coordinator side of process mode: forks one worker process per LP,
// drives the per-step barrier over a loopback control socket, relays
// migrations and assembles the final SimReport. Worker and mode faults
// surface as SimAbort; transport failures as well, so a worker that dies
// or goes silent aborts the whole run instead of hanging it.
SimReport run_processes(const SimConfig& cfg);

// Worker entry, run in the forked child: connects back to the coordinator,
// hosts one LP and exchanges envelopes with peer workers over TCP using
// the standard wire frames. Returns the process exit code.
int worker_main(LpId lp, const std::string& coordinator_endpoint);

} // namespace ftsim
