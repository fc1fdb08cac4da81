#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ftsim/replication.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

// Envelopes routed by one instance during the current observation window,
// keyed by destination LP. Reset at every evaluation.
struct InteractionSample {
    InstanceId instance;
    std::map<LpId, std::uint64_t> sent_to;
};

struct MigrationDecision {
    InstanceId instance;
    LpId from = kNoLp;
    LpId to = kNoLp;
    std::uint64_t epoch = 0;
};

// For each sampled instance, finds the LP receiving the dominant share of
// its traffic and proposes a move there when: share > threshold, the target
// differs from the current host, hosts no sibling instance of the same
// entity, is not crashed, and stays within the per-LP instance cap.
// Accepted proposals update the working placement, so one round never emits
// conflicting decisions. Deterministic given inputs (samples evaluated in
// ascending instance order, argmax ties broken by lowest LpId).
std::vector<MigrationDecision> evaluate_migrations(
    const std::vector<InteractionSample>& samples,
    const PlacementMap& placement, const std::set<LpId>& crashed,
    double threshold, std::uint64_t cap);

} // namespace ftsim
