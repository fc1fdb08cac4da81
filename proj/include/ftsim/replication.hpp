#pragma once

#include <cstdint>
#include <vector>

#include "ftsim/envelope.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

// none -> 1, crash -> f+1, byzantine -> 2f+1
std::uint32_t required_instances(ReplicationPolicy policy);

// Placement of every entity instance onto an LP. Indexed by
// entity*M + replica. Migration rewrites entries and bumps the epoch.
class PlacementMap {
public:
    PlacementMap() = default;
    PlacementMap(std::uint64_t num_entities, std::uint32_t replicas,
                 std::uint32_t num_lps);

    LpId lp_of(InstanceId id) const;
    void set_lp(InstanceId id, LpId lp);

    std::uint64_t count_on(LpId lp) const;
    bool entity_has_instance_on(EntityId entity, LpId lp) const;

    std::uint64_t num_entities() const { return num_entities_; }
    std::uint32_t replicas() const { return replicas_; }
    std::uint32_t num_lps() const { return num_lps_; }

    std::uint64_t epoch = 0;

    friend bool operator==(const PlacementMap&, const PlacementMap&) = default;

private:
    std::size_t index(InstanceId id) const;

    std::uint64_t num_entities_ = 0;
    std::uint32_t replicas_ = 0;
    std::uint32_t num_lps_ = 0;
    std::vector<LpId> lp_;
};

// Round-robin over the flattened instance list: instance (e, j) lands on
// LP (e*M + j) mod L. Keeps per-LP load within one instance of even and,
// for M <= L, never co-locates two replicas of the same entity.
PlacementMap place_instances(std::uint64_t num_entities,
                             std::uint32_t replicas, std::uint32_t num_lps);

// Replicas of an entity share this seed so they evolve in lockstep.
std::uint64_t seed_for(std::uint64_t global_seed, EntityId entity);

// Expands one logical send into M envelopes, one per destination replica.
// seq must already be assigned; every copy carries the same LogicalId.
std::vector<Envelope> fan_out(const Envelope& logical, std::uint32_t replicas);

} // namespace ftsim
