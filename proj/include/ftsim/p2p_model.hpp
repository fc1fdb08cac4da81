#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ftsim/config.hpp"
#include "ftsim/model.hpp"
#include "ftsim/rng.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

inline constexpr std::uint8_t kPingTag = 0x01;
inline constexpr std::uint8_t kPongTag = 0x02;
inline constexpr std::size_t kPingPongBytes = 9; // tag + u64 step

Bytes make_ping(Timestep send_step);
Bytes make_pong(Timestep ping_send_step);

struct OverlayGraph {
    std::vector<std::vector<EntityId>> neighbors; // sorted, no self-loops
};

// Random directed overlay: every node gets exactly out_degree distinct
// outgoing edges. Deterministic given seed.
OverlayGraph build_overlay(std::uint64_t num_peers, std::uint32_t out_degree,
                           std::uint64_t seed);

// A peer: pings a neighbor (probability p) or a random non-neighbor every
// ping-period steps, answers pings with pongs, keeps running-mean latency
// estimates per known link, and periodically swaps its worst-measured
// neighbor for the best-measured non-neighbor.
class PeerEntity : public Entity {
public:
    PeerEntity(EntityId id, std::uint64_t seed, std::uint64_t num_peers,
               const P2PModelConfig& cfg, std::vector<EntityId> neighbors);

    void on_deliver(const DeliverContext& ctx, const Bytes& payload,
                    EmissionSink& sink) override;
    void on_tick(Timestep t, EmissionSink& sink) override;
    Bytes snapshot() const override;
    void restore(const Bytes& state) override;
    bool payload_plausible(const Bytes& payload) const override;

    const std::vector<EntityId>& neighbors() const { return neighbors_; }
    double latency_estimate(EntityId peer) const;
    std::size_t pending_pings() const { return pending_.size(); }

private:
    void do_ping(Timestep t, EmissionSink& sink);
    void update_neighbors();
    bool is_neighbor(EntityId id) const;

    EntityId id_;
    std::uint64_t num_peers_;
    P2PModelConfig cfg_;
    SplitMix64 rng_;
    std::vector<EntityId> neighbors_;
    struct LatencyStat {
        double sum = 0.0;
        std::uint64_t count = 0;
    };
    std::map<EntityId, LatencyStat> latency_;
    std::set<std::pair<EntityId, Timestep>> pending_;
};

class P2PModel : public Model {
public:
    P2PModel(const P2PModelConfig& cfg, std::uint64_t num_entities,
             std::uint64_t global_seed);

    std::unique_ptr<Entity> create_entity(EntityId id,
                                          std::uint64_t seed) override;

    const OverlayGraph& overlay() const { return overlay_; }

private:
    P2PModelConfig cfg_;
    std::uint64_t num_entities_;
    OverlayGraph overlay_;
};

} // namespace ftsim
