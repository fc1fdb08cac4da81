#pragma once

#include <compare>
#include <cstdint>

namespace ftsim {

// Simulation time unit. All LPs advance through timesteps in lockstep.
using Timestep = std::uint64_t;

using LpId = std::int32_t;
using EntityId = std::int64_t;

constexpr LpId kNoLp = -1;

// Engine-reserved entity id for in-band control frames (end-of-step and
// hello markers on process-mode peer links). Model entities are >= 0.
constexpr EntityId kControlEntity = -1;

// One concrete copy of a replicated entity: (entity, replica index < M).
struct InstanceId {
    EntityId entity = 0;
    std::uint16_t replica = 0;

    friend auto operator<=>(const InstanceId&, const InstanceId&) = default;
};

enum class FailureMode { none, crash, byzantine };

// Failure mode plus tolerated fault count; determines the replication
// degree M (none -> 1, crash -> f+1, byzantine -> 2f+1).
struct ReplicationPolicy {
    FailureMode mode = FailureMode::none;
    std::uint32_t f = 0;
};

enum class LpStatus { running, crashed };

const char* to_string(FailureMode m);

} // namespace ftsim
