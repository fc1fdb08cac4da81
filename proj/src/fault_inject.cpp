#include "ftsim/fault_inject.hpp"

#include <algorithm>
#include <set>

#include "ftsim/errors.hpp"

namespace ftsim {

std::vector<Envelope> corrupt(const Envelope& e, CorruptionMode mode) {
    switch (mode) {
        case CorruptionMode::flip_payload: {
            Envelope out = e;
            for (auto& b : out.payload) b ^= kFlipMask;
            return {std::move(out)};
        }
        case CorruptionMode::drop_all:
            return {};
        case CorruptionMode::duplicate:
            return {e, e};
        case CorruptionMode::garble_seq: {
            Envelope out = e;
            out.seq += 1;
            return {std::move(out)};
        }
    }
    throw ConfigError("invalid corruption mode");
}

FaultSchedule::FaultSchedule(const FaultPlan& plan) {
    std::set<LpId> seen;
    for (const auto& c : plan.crashes) {
        if (!seen.insert(c.lp).second)
            throw ConfigError("LP appears more than once in fault plan");
        crash_step_[c.at_step].push_back(c.lp);
    }
    for (auto& [step, lps] : crash_step_) std::sort(lps.begin(), lps.end());
    for (const auto& b : plan.byzantine) {
        if (!seen.insert(b.lp).second)
            throw ConfigError("LP appears more than once in fault plan");
        byzantine_.emplace(b.lp, b);
    }
}

std::vector<LpId> FaultSchedule::crashes_at(Timestep t) const {
    auto it = crash_step_.find(t);
    if (it == crash_step_.end()) return {};
    return it->second;
}

std::optional<CorruptionMode> FaultSchedule::corruption_for(LpId lp,
                                                            Timestep t) const {
    auto it = byzantine_.find(lp);
    if (it == byzantine_.end() || t < it->second.from_step)
        return std::nullopt;
    return it->second.mode;
}

} // namespace ftsim
