#include "ftsim/ft_filter.hpp"

#include <algorithm>

namespace ftsim {

const char* to_string(FilterOutcome o) {
    switch (o) {
        case FilterOutcome::deliver: return "deliver";
        case FilterOutcome::hold: return "hold";
        case FilterOutcome::drop_duplicate: return "drop-duplicate";
        case FilterOutcome::drop_excess: return "drop-excess";
        case FilterOutcome::drop_equivocal: return "drop-equivocal";
    }
    return "?";
}

FilterResult QuorumBuffer::filter_crash(const Envelope& e) {
    Key key{e.dst, e.logical_id()};
    auto [it, fresh] = entries_.try_emplace(key);
    Entry& entry = it->second;
    if (fresh) entry.delivery_step = e.delivery_step;
    if (entry.delivered)
        return {FilterOutcome::drop_duplicate, nullptr, 1};
    entry.delivered = true;
    return {FilterOutcome::deliver, &e.payload, 0};
}

FilterResult QuorumBuffer::filter_byzantine(const Envelope& e,
                                            std::uint32_t f) {
    Key key{e.dst, e.logical_id()};
    auto [it, fresh] = entries_.try_emplace(key);
    Entry& entry = it->second;
    if (fresh) entry.delivery_step = e.delivery_step;
    if (entry.delivered)
        return {FilterOutcome::drop_excess, nullptr, 1};

    const std::uint64_t digest = e.payload_digest();
    auto vote = entry.replica_vote.find(e.src.replica);
    if (vote != entry.replica_vote.end()) {
        if (vote->second == digest &&
            entry.groups.at(digest).payload == e.payload)
            return {FilterOutcome::hold, nullptr, 1};
        return {FilterOutcome::drop_equivocal, nullptr, 0};
    }

    auto group_it = entry.groups.find(digest);
    if (group_it != entry.groups.end() &&
        group_it->second.payload != e.payload)
        return {FilterOutcome::drop_equivocal, nullptr, 0};

    if (group_it == entry.groups.end())
        group_it = entry.groups.emplace(digest, DigestGroup{e.payload, {}})
                       .first;
    DigestGroup& group = group_it->second;
    group.voters.push_back(e.src.replica);
    entry.replica_vote.emplace(e.src.replica, digest);
    ++entry.recorded_copies;

    if (group.voters.size() >= f + 1) {
        entry.delivered = true;
        return {FilterOutcome::deliver, &group.payload,
                entry.recorded_copies - 1};
    }
    return {FilterOutcome::hold, nullptr, 0};
}

FlushStats QuorumBuffer::flush_expired(Timestep horizon, Timestep grace) {
    FlushStats stats;
    if (horizon < grace) return stats;
    const Timestep threshold = horizon - grace;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->second.delivery_step >= threshold) {
            ++it;
            continue;
        }
        if (it->second.delivered) {
            ++stats.removed_delivered;
        } else {
            ++stats.expired_entries;
            stats.expired_copies += it->second.recorded_copies;
        }
        it = entries_.erase(it);
    }
    return stats;
}

std::uint64_t QuorumBuffer::residual_copies() const {
    std::uint64_t total = 0;
    for (const auto& [key, entry] : entries_)
        if (!entry.delivered) total += entry.recorded_copies;
    return total;
}

std::uint64_t QuorumBuffer::held_entries() const {
    std::uint64_t held = 0;
    for (const auto& [key, entry] : entries_)
        if (!entry.delivered) ++held;
    return held;
}

std::uint64_t QuorumBuffer::drop_instance(InstanceId dst) {
    std::uint64_t dropped = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->first.dst != dst) {
            ++it;
            continue;
        }
        if (!it->second.delivered) dropped += it->second.recorded_copies;
        it = entries_.erase(it);
    }
    return dropped;
}

} // namespace ftsim
