#include "ftsim/replication.hpp"

#include "ftsim/errors.hpp"
#include "ftsim/rng.hpp"

namespace ftsim {

std::uint32_t required_instances(ReplicationPolicy policy) {
    switch (policy.mode) {
        case FailureMode::none: return 1;
        case FailureMode::crash: return policy.f + 1;
        case FailureMode::byzantine: return 2 * policy.f + 1;
    }
    throw PlacementError("invalid failure mode");
}

PlacementMap::PlacementMap(std::uint64_t num_entities, std::uint32_t replicas,
                           std::uint32_t num_lps)
    : num_entities_(num_entities),
      replicas_(replicas),
      num_lps_(num_lps),
      lp_(num_entities * replicas, kNoLp) {}

std::size_t PlacementMap::index(InstanceId id) const {
    if (id.entity < 0 ||
        static_cast<std::uint64_t>(id.entity) >= num_entities_ ||
        id.replica >= replicas_)
        throw PlacementError("instance id out of range");
    return static_cast<std::size_t>(id.entity) * replicas_ + id.replica;
}

LpId PlacementMap::lp_of(InstanceId id) const { return lp_[index(id)]; }

void PlacementMap::set_lp(InstanceId id, LpId lp) {
    if (lp < 0 || static_cast<std::uint32_t>(lp) >= num_lps_)
        throw PlacementError("lp id out of range");
    lp_[index(id)] = lp;
}

std::uint64_t PlacementMap::count_on(LpId lp) const {
    std::uint64_t n = 0;
    for (LpId v : lp_)
        if (v == lp) ++n;
    return n;
}

bool PlacementMap::entity_has_instance_on(EntityId entity, LpId lp) const {
    for (std::uint32_t j = 0; j < replicas_; ++j)
        if (lp_of({entity, static_cast<std::uint16_t>(j)}) == lp) return true;
    return false;
}

PlacementMap place_instances(std::uint64_t num_entities,
                             std::uint32_t replicas, std::uint32_t num_lps) {
    if (replicas > num_lps)
        throw PlacementError(
            "cannot place replicas on distinct LPs: M exceeds L");
    PlacementMap map(num_entities, replicas, num_lps);
    std::uint64_t k = 0;
    for (std::uint64_t e = 0; e < num_entities; ++e)
        for (std::uint32_t j = 0; j < replicas; ++j, ++k)
            map.set_lp({static_cast<EntityId>(e),
                        static_cast<std::uint16_t>(j)},
                       static_cast<LpId>(k % num_lps));
    return map;
}

std::uint64_t seed_for(std::uint64_t global_seed, EntityId entity) {
    return mix64(global_seed ^
                 mix64(static_cast<std::uint64_t>(entity) +
                       0x9e3779b97f4a7c15ULL));
}

std::vector<Envelope> fan_out(const Envelope& logical,
                              std::uint32_t replicas) {
    std::vector<Envelope> copies;
    copies.reserve(replicas);
    for (std::uint32_t j = 0; j < replicas; ++j) {
        Envelope e = logical;
        e.dst.replica = static_cast<std::uint16_t>(j);
        copies.push_back(std::move(e));
    }
    return copies;
}

} // namespace ftsim
