#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ftsim/config.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

struct LpCounters {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dedup_dropped = 0;
    std::uint64_t equivocal_dropped = 0;
    std::uint64_t quorum_held_peak = 0;
    std::uint64_t quorum_expired = 0;
    std::uint64_t quorum_residual = 0;
    std::uint64_t inbox_pending = 0;
    std::uint64_t lost_to_crash = 0;
    std::uint64_t suppressed_to_crashed = 0;
    std::uint64_t corrupt_delivered = 0;
    std::uint64_t unmatched_pong = 0;

    LpCounters& operator+=(const LpCounters& o);
    friend bool operator==(const LpCounters&, const LpCounters&) = default;

    // received = delivered + dedup + equivocal + expired + residual + lost
    bool conserved() const;
};

struct EntityResult {
    EntityId id = 0;
    std::uint64_t state_digest = 0;
    std::uint64_t delivered_digest = 0;
    bool replicas_consistent = true;
    std::uint32_t live_replicas = 0;

    friend bool operator==(const EntityResult&, const EntityResult&) = default;
};

struct SimReport {
    SimConfig config;
    std::uint64_t seed = 0;
    std::vector<LpCounters> lps;      // indexed by LpId
    std::vector<EntityResult> entities; // ascending EntityId
    std::uint64_t placement_epochs = 0;
    std::uint64_t migrations_applied = 0;
    std::uint64_t migrations_skipped = 0;
    double wall_clock_s = 0.0;

    LpCounters totals() const;

    // Stable digest over everything except wall-clock and exec mode, so
    // thread and process runs of one config can be compared byte-for-byte.
    std::uint64_t digest() const;
};

struct ReportDiff {
    bool incompatible = false;
    std::vector<EntityId> differing_entities;
    bool counters_differ = false;
    bool digests_equal() const {
        return !incompatible && differing_entities.empty();
    }
};

// Semantic equivalence = identical per-entity digests; counter deltas are
// reported but do not break equivalence (replication degree changes counter
// volume without changing model behavior).
ReportDiff compare_reports(const SimReport& a, const SimReport& b);

extern const char* const kCsvHeader;

// One `run` row per report plus its `lp` and `entity` rows; with summary,
// trailing `mean` and `ci995` rows over the run rows (Student-t, 99.5%
// two-sided). RFC-4180 quoting.
void write_report_csv(std::ostream& out, const std::vector<SimReport>& runs,
                      bool summary);
std::string report_csv(const std::vector<SimReport>& runs, bool summary);

// Minimal RFC-4180 reader (quoted fields, embedded commas/newlines/quotes).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Rebuilds comparable report skeletons (counters + entity digests) from a
// CSV produced by write_report_csv.
std::vector<SimReport> load_report_csv(const std::string& text);

} // namespace ftsim
