#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ftsim/envelope.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

enum class FilterOutcome {
    deliver,
    hold,
    drop_duplicate,
    drop_excess,
    drop_equivocal,
};

const char* to_string(FilterOutcome o);

// Verdict for one incoming copy. dedup_drops is the number of copies newly
// classified as redundant by this call: held copies absorbed when a quorum
// completes, or the copy itself when it repeats/post-dates a delivery.
struct FilterResult {
    FilterOutcome outcome = FilterOutcome::hold;
    const Bytes* payload = nullptr; // non-null iff outcome == deliver
    std::uint64_t dedup_drops = 0;
};

struct FlushStats {
    std::uint64_t expired_copies = 0;
    std::uint64_t expired_entries = 0;
    std::uint64_t removed_delivered = 0;
};

// Receive-side filter state for one LP. Tracks, per destination instance and
// logical message, which sender replicas have voted for which payload digest.
class QuorumBuffer {
public:
    // First copy of a logical id delivers; later copies are duplicates.
    // Payload bytes are not compared.
    FilterResult filter_crash(const Envelope& e);

    // Records (sender replica, payload digest); delivers once some digest
    // holds f+1 votes from distinct replicas. A replica repeating its vote
    // is dropped; a replica contradicting its vote is equivocal.
    FilterResult filter_byzantine(const Envelope& e, std::uint32_t f);

    // Removes entries with delivery_step < horizon - grace. Undelivered
    // entries count their recorded copies as expired.
    FlushStats flush_expired(Timestep horizon, Timestep grace);

    // Copies recorded in entries that never reached delivery.
    std::uint64_t residual_copies() const;

    // Undelivered entries currently held (gauge for the held-peak metric).
    std::uint64_t held_entries() const;

    // Drops all state for a destination instance (migration hand-off);
    // returns recorded copies of undelivered entries, to be counted expired.
    std::uint64_t drop_instance(InstanceId dst);

    void clear() { entries_.clear(); }
    std::size_t size() const { return entries_.size(); }

private:
    struct Key {
        InstanceId dst;
        LogicalId id;
        friend auto operator<=>(const Key&, const Key&) = default;
    };

    struct DigestGroup {
        Bytes payload;
        std::vector<std::uint16_t> voters;
    };

    struct Entry {
        Timestep delivery_step = 0;
        bool delivered = false;
        std::uint64_t recorded_copies = 0;
        std::map<std::uint16_t, std::uint64_t> replica_vote;
        std::map<std::uint64_t, DigestGroup> groups;
    };

    std::map<Key, Entry> entries_;
};

} // namespace ftsim
