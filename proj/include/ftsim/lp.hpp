#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "ftsim/clustering.hpp"
#include "ftsim/config.hpp"
#include "ftsim/digest.hpp"
#include "ftsim/fault_inject.hpp"
#include "ftsim/ft_filter.hpp"
#include "ftsim/inbox.hpp"
#include "ftsim/model.hpp"
#include "ftsim/replication.hpp"
#include "ftsim/report.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

struct InstanceRec {
    std::unique_ptr<Entity> entity;
    Fnv1a64 delivered_digest;
    std::uint32_t step_seq = 0;
    std::map<LpId, std::uint64_t> window_sent;
};

// Everything an instance carries when it migrates to another LP.
struct MigrationPayload {
    InstanceId instance;
    Bytes state;
    std::uint64_t delivered_digest = 0;
    std::vector<Envelope> pending;
};

class LpRuntime {
public:
    LpRuntime(LpId id, const SimConfig& cfg) : id_(id), cfg_(&cfg) {}

    LpId id() const { return id_; }
    LpStatus status() const { return status_; }

    void add_instance(InstanceId iid, std::unique_ptr<Entity> entity);

    // One barrier-released timestep: drain this step's inbox bucket in the
    // deterministic intra-step order, filter, deliver, then tick every
    // hosted instance. Outgoing traffic is fanned out, optionally corrupted
    // by the fault schedule, and routed by send-time placement.
    void execute_step(Timestep t, Router& router,
                      const PlacementMap& placement,
                      const std::set<LpId>& crashed,
                      const FaultSchedule& faults);

    // Flips status, discards the queued inbox (counted lost) and freezes
    // undelivered quorum copies as residual.
    void crash();

    // Drains the interaction window of every hosted instance.
    std::vector<InteractionSample> harvest_window();

    MigrationPayload extract_instance(InstanceId iid);
    void install_instance(InstanceId iid, std::unique_ptr<Entity> entity,
                          std::uint64_t delivered_digest,
                          std::vector<Envelope> pending);

    // End-of-run accounting: envelopes still queued and copies still held.
    void finalize_counters();

    Inbox& inbox() { return inbox_; }
    LpCounters& counters() { return counters_; }
    const LpCounters& counters() const { return counters_; }

    const InstanceRec* find_instance(InstanceId iid) const;
    const std::map<InstanceId, InstanceRec>& instances() const {
        return instances_;
    }

private:
    friend class StepSink;

    LpId id_;
    const SimConfig* cfg_;
    LpStatus status_ = LpStatus::running;
    Inbox inbox_;
    std::map<InstanceId, InstanceRec> instances_;
    QuorumBuffer buffer_;
    LpCounters counters_;
};

} // namespace ftsim
