#pragma once

#include <cstddef>
#include <cstdint>

#include "ftsim/bytes.hpp"
#include "ftsim/envelope.hpp"

namespace ftsim::wire {

// Frame layout (all integers big-endian):
//   u32  payload length
//   i64  source entity id
//   u16  source replica index
//   i64  destination entity id
//   u16  destination replica index
//   u64  send timestep
//   u64  delivery timestep
//   u32  sequence number
//   ...  payload bytes
inline constexpr std::size_t kHeaderBytes = 40;
inline constexpr std::size_t kMinFrameBytes = 4 + kHeaderBytes;
inline constexpr std::uint32_t kMaxPayloadBytes = 1u << 26;

std::size_t frame_size(const Envelope& e);

// Appends the encoded frame to out and returns the number of bytes written.
std::size_t encode(const Envelope& e, Bytes& out);
Bytes encode(const Envelope& e);

// Decodes one frame starting at data[0]. Throws WireError on truncated or
// oversized input. consumed receives the full frame length.
Envelope decode(const std::uint8_t* data, std::size_t size,
                std::size_t& consumed);
Envelope decode(const Bytes& frame);

} // namespace ftsim::wire
