#include "ftsim/wire.hpp"

#include "ftsim/errors.hpp"

namespace ftsim::wire {

std::size_t frame_size(const Envelope& e) {
    return kMinFrameBytes + e.payload.size();
}

std::size_t encode(const Envelope& e, Bytes& out) {
    if (e.payload.size() > kMaxPayloadBytes)
        throw WireError("payload exceeds frame limit");
    ByteWriter w;
    w.put_u32(static_cast<std::uint32_t>(e.payload.size()));
    w.put_i64(e.src.entity);
    w.put_u16(e.src.replica);
    w.put_i64(e.dst.entity);
    w.put_u16(e.dst.replica);
    w.put_u64(e.send_step);
    w.put_u64(e.delivery_step);
    w.put_u32(e.seq);
    w.put_bytes(e.payload.data(), e.payload.size());
    const Bytes& frame = w.data();
    out.insert(out.end(), frame.begin(), frame.end());
    return frame.size();
}

Bytes encode(const Envelope& e) {
    Bytes out;
    encode(e, out);
    return out;
}

Envelope decode(const std::uint8_t* data, std::size_t size,
                std::size_t& consumed) {
    ByteReader r(data, size);
    std::uint32_t payload_len = r.get_u32();
    if (payload_len > kMaxPayloadBytes)
        throw WireError("payload length exceeds frame limit");
    Envelope e;
    e.src.entity = r.get_i64();
    e.src.replica = r.get_u16();
    e.dst.entity = r.get_i64();
    e.dst.replica = r.get_u16();
    e.send_step = r.get_u64();
    e.delivery_step = r.get_u64();
    e.seq = r.get_u32();
    e.payload = r.get_bytes(payload_len);
    consumed = kMinFrameBytes + payload_len;
    return e;
}

Envelope decode(const Bytes& frame) {
    std::size_t consumed = 0;
    Envelope e = decode(frame.data(), frame.size(), consumed);
    if (consumed != frame.size())
        throw WireError("trailing bytes after frame");
    return e;
}

} // namespace ftsim::wire
