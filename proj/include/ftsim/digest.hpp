#pragma once

#include <cstddef>
#include <cstdint>

namespace ftsim {

// Incremental FNV-1a (64 bit). Used for payload digests, entity state
// digests and delivered-stream digests. Multi-byte integers are folded in
// a fixed byte order so digests are platform independent.
class Fnv1a64 {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= kPrime;
        }
    }

    void update_u8(std::uint8_t v) { update(&v, 1); }

    void update_u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        update(b, 8);
    }

    void update_u32(std::uint32_t v) { update_u64(v); }
    void update_i64(std::int64_t v) { update_u64(static_cast<std::uint64_t>(v)); }

    std::uint64_t value() const { return h_; }
    void set_value(std::uint64_t v) { h_ = v; }

private:
    std::uint64_t h_ = kOffset;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    Fnv1a64 d;
    d.update(data, n);
    return d.value();
}

} // namespace ftsim
