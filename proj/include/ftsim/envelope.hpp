#pragma once

#include <compare>
#include <cstdint>

#include "ftsim/bytes.hpp"
#include "ftsim/digest.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

// Identity of a logical message, independent of which replica carried it.
// All M copies produced by fan-out of one send share the same LogicalId.
struct LogicalId {
    EntityId src_entity = 0;
    EntityId dst_entity = 0;
    Timestep send_step = 0;
    std::uint32_t seq = 0;

    friend auto operator<=>(const LogicalId&, const LogicalId&) = default;
};

struct Envelope {
    InstanceId src;
    InstanceId dst;
    Timestep send_step = 0;
    Timestep delivery_step = 0;
    std::uint32_t seq = 0;
    Bytes payload;

    friend bool operator==(const Envelope&, const Envelope&) = default;

    LogicalId logical_id() const {
        return LogicalId{src.entity, dst.entity, send_step, seq};
    }

    std::uint64_t payload_digest() const {
        return fnv1a64(payload.data(), payload.size());
    }
};

} // namespace ftsim
