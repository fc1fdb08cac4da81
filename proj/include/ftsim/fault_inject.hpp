#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ftsim/config.hpp"
#include "ftsim/envelope.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

inline constexpr std::uint8_t kFlipMask = 0xA5;

// Applies one corruption mode to an outgoing envelope. Deterministic:
// flip-payload XORs a fixed mask, drop-all emits nothing, duplicate emits
// the envelope twice, garble-seq bumps the sequence number.
std::vector<Envelope> corrupt(const Envelope& e, CorruptionMode mode);

// Timestep-indexed view of a FaultPlan.
class FaultSchedule {
public:
    FaultSchedule() = default;
    explicit FaultSchedule(const FaultPlan& plan);

    // LPs whose crash fires at the barrier before step t executes.
    std::vector<LpId> crashes_at(Timestep t) const;

    // Corruption applied to lp's outgoing envelopes at step t, if any.
    std::optional<CorruptionMode> corruption_for(LpId lp, Timestep t) const;

    bool empty() const { return crash_step_.empty() && byzantine_.empty(); }

private:
    std::map<Timestep, std::vector<LpId>> crash_step_;
    std::map<LpId, ByzantineFault> byzantine_;
};

} // namespace ftsim
