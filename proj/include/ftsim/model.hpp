#pragma once

#include <cstdint>
#include <memory>

#include "ftsim/bytes.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

// One logical outgoing message. The hosting LP assigns the sequence number,
// stamps delivery_step = now + delay and fans the message out to all
// replicas of the destination entity.
struct Emission {
    EntityId dst = 0;
    Timestep delay = 1; // >= 1
    Bytes payload;
};

class EmissionSink {
public:
    virtual ~EmissionSink() = default;
    virtual void send(Emission e) = 0;
    virtual void note_unmatched() = 0;
};

struct DeliverContext {
    EntityId src = 0;
    Timestep send_step = 0;
    Timestep now = 0;
};

// A simulated entity. Handlers must be pure functions of entity state and
// their per-entity RNG: no ambient randomness, no wall clock. Replicas of
// one entity run the same code with the same seed, so equal inputs keep
// their states byte-identical.
class Entity {
public:
    virtual ~Entity() = default;

    virtual void on_deliver(const DeliverContext& ctx, const Bytes& payload,
                            EmissionSink& sink) = 0;
    virtual void on_tick(Timestep t, EmissionSink& sink) = 0;

    // Canonical state encoding: replica-independent, stable across
    // processes. Used for state digests and migration transfer.
    virtual Bytes snapshot() const = 0;
    virtual void restore(const Bytes& state) = 0;

    // Sanity check a payload before delivery-side accounting; lets the
    // report count corrupted payloads that slipped past filtering.
    virtual bool payload_plausible(const Bytes& payload) const {
        (void)payload;
        return true;
    }
};

class Model {
public:
    virtual ~Model() = default;
    virtual std::unique_ptr<Entity> create_entity(EntityId id,
                                                  std::uint64_t seed) = 0;
};

} // namespace ftsim
