#include "ftsim/p2p_model.hpp"

#include <algorithm>

#include "ftsim/bytes.hpp"
#include "ftsim/errors.hpp"

namespace ftsim {

Bytes make_ping(Timestep send_step) {
    ByteWriter w;
    w.put_u8(kPingTag);
    w.put_u64(send_step);
    return w.take();
}

Bytes make_pong(Timestep ping_send_step) {
    ByteWriter w;
    w.put_u8(kPongTag);
    w.put_u64(ping_send_step);
    return w.take();
}

OverlayGraph build_overlay(std::uint64_t num_peers, std::uint32_t out_degree,
                           std::uint64_t seed) {
    if (out_degree >= num_peers)
        throw ConfigError("overlay infeasible: out-degree must be below N");
    OverlayGraph g;
    g.neighbors.resize(num_peers);
    SplitMix64 rng(mix64(seed ^ 0x6f7665726c6179ULL)); // "overlay"
    for (std::uint64_t node = 0; node < num_peers; ++node) {
        std::set<EntityId> picked;
        while (picked.size() < out_degree) {
            auto target = static_cast<EntityId>(rng.next_below(num_peers));
            if (target == static_cast<EntityId>(node)) continue;
            picked.insert(target);
        }
        g.neighbors[node].assign(picked.begin(), picked.end());
    }
    return g;
}

PeerEntity::PeerEntity(EntityId id, std::uint64_t seed,
                       std::uint64_t num_peers, const P2PModelConfig& cfg,
                       std::vector<EntityId> neighbors)
    : id_(id),
      num_peers_(num_peers),
      cfg_(cfg),
      rng_(seed),
      neighbors_(std::move(neighbors)) {}

bool PeerEntity::is_neighbor(EntityId id) const {
    return std::binary_search(neighbors_.begin(), neighbors_.end(), id);
}

double PeerEntity::latency_estimate(EntityId peer) const {
    auto it = latency_.find(peer);
    if (it == latency_.end() || it->second.count == 0) return -1.0;
    return it->second.sum / static_cast<double>(it->second.count);
}

void PeerEntity::do_ping(Timestep t, EmissionSink& sink) {
    const double u = rng_.next_u01();
    const std::uint64_t pool = num_peers_ - 1 - neighbors_.size();
    EntityId target;
    if (u < cfg_.p_neighbor || pool == 0) {
        // pool == 0: complete-graph overlay, everyone is a neighbor
        target = neighbors_[rng_.next_below(neighbors_.size())];
    } else {
        // idx-th id outside {self} ∪ neighbors, in ascending id order
        std::uint64_t idx = rng_.next_below(pool);
        std::vector<EntityId> excluded = neighbors_;
        excluded.insert(
            std::upper_bound(excluded.begin(), excluded.end(), id_), id_);
        auto candidate = static_cast<EntityId>(idx);
        for (EntityId e : excluded) {
            if (e <= candidate) ++candidate;
            else break;
        }
        target = candidate;
    }
    Timestep delay = lognormal_delay(rng_, cfg_.latency_mu,
                                     cfg_.latency_sigma);
    sink.send({target, delay, make_ping(t)});
    pending_.insert({target, t});
}

void PeerEntity::update_neighbors() {
    EntityId worst = kControlEntity;
    double worst_est = -1.0;
    for (EntityId n : neighbors_) {
        double est = latency_estimate(n);
        if (est < 0.0) continue;
        if (est > worst_est) {
            worst = n;
            worst_est = est;
        }
    }
    if (worst == kControlEntity) return;

    EntityId best = kControlEntity;
    double best_est = -1.0;
    for (const auto& [peer, stat] : latency_) {
        if (stat.count == 0 || peer == id_ || is_neighbor(peer)) continue;
        double est = stat.sum / static_cast<double>(stat.count);
        if (best == kControlEntity || est < best_est) {
            best = peer;
            best_est = est;
        }
    }
    if (best == kControlEntity || best_est >= worst_est) return;

    neighbors_.erase(
        std::find(neighbors_.begin(), neighbors_.end(), worst));
    neighbors_.insert(
        std::upper_bound(neighbors_.begin(), neighbors_.end(), best), best);
}

void PeerEntity::on_tick(Timestep t, EmissionSink& sink) {
    if (t % cfg_.ping_period == 0) do_ping(t, sink);
    if (t % cfg_.neighbor_update_period == 0) update_neighbors();
}

void PeerEntity::on_deliver(const DeliverContext& ctx, const Bytes& payload,
                            EmissionSink& sink) {
    if (payload.size() != kPingPongBytes) return;
    ByteReader r(payload);
    const std::uint8_t tag = r.get_u8();
    const Timestep step = r.get_u64();
    if (tag == kPingTag) {
        Timestep delay = lognormal_delay(rng_, cfg_.latency_mu,
                                         cfg_.latency_sigma);
        sink.send({ctx.src, delay, make_pong(step)});
    } else if (tag == kPongTag) {
        auto it = pending_.find({ctx.src, step});
        if (it == pending_.end()) {
            sink.note_unmatched();
            return;
        }
        pending_.erase(it);
        auto& stat = latency_[ctx.src];
        stat.sum += static_cast<double>(ctx.now - step) / 2.0;
        stat.count += 1;
    }
}

bool PeerEntity::payload_plausible(const Bytes& payload) const {
    return payload.size() == kPingPongBytes &&
           (payload[0] == kPingTag || payload[0] == kPongTag);
}

Bytes PeerEntity::snapshot() const {
    ByteWriter w;
    w.put_u64(rng_.state());
    w.put_u32(static_cast<std::uint32_t>(neighbors_.size()));
    for (EntityId n : neighbors_) w.put_i64(n);
    w.put_u32(static_cast<std::uint32_t>(latency_.size()));
    for (const auto& [peer, stat] : latency_) {
        w.put_i64(peer);
        w.put_f64(stat.sum);
        w.put_u64(stat.count);
    }
    w.put_u32(static_cast<std::uint32_t>(pending_.size()));
    for (const auto& [target, step] : pending_) {
        w.put_i64(target);
        w.put_u64(step);
    }
    return w.take();
}

void PeerEntity::restore(const Bytes& state) {
    ByteReader r(state);
    rng_.set_state(r.get_u64());
    neighbors_.clear();
    const std::uint32_t nn = r.get_u32();
    for (std::uint32_t i = 0; i < nn; ++i)
        neighbors_.push_back(r.get_i64());
    latency_.clear();
    const std::uint32_t nl = r.get_u32();
    for (std::uint32_t i = 0; i < nl; ++i) {
        EntityId peer = r.get_i64();
        LatencyStat stat;
        stat.sum = r.get_f64();
        stat.count = r.get_u64();
        latency_.emplace(peer, stat);
    }
    pending_.clear();
    const std::uint32_t np = r.get_u32();
    for (std::uint32_t i = 0; i < np; ++i) {
        EntityId target = r.get_i64();
        Timestep step = r.get_u64();
        pending_.insert({target, step});
    }
    if (!r.done()) throw WireError("trailing bytes in peer snapshot");
}

P2PModel::P2PModel(const P2PModelConfig& cfg, std::uint64_t num_entities,
                   std::uint64_t global_seed)
    : cfg_(cfg),
      num_entities_(num_entities),
      overlay_(build_overlay(num_entities, cfg.out_degree, global_seed)) {}

std::unique_ptr<Entity> P2PModel::create_entity(EntityId id,
                                                std::uint64_t seed) {
    return std::make_unique<PeerEntity>(id, seed, num_entities_, cfg_,
                                        overlay_.neighbors[id]);
}

} // namespace ftsim
