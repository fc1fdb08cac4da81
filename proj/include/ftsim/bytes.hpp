#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "ftsim/errors.hpp"

namespace ftsim {

using Bytes = std::vector<std::uint8_t>;

// Big-endian serialization helpers shared by the wire codec, the control
// protocol and entity snapshots.
class ByteWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(v); }

    void put_u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }

    void put_u32(std::uint32_t v) {
        for (int s = 24; s >= 0; s -= 8)
            buf_.push_back(static_cast<std::uint8_t>(v >> s));
    }

    void put_u64(std::uint64_t v) {
        for (int s = 56; s >= 0; s -= 8)
            buf_.push_back(static_cast<std::uint8_t>(v >> s));
    }

    void put_i64(std::int64_t v) { put_u64(static_cast<std::uint64_t>(v)); }
    void put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

    void put_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }

    void put_blob(const Bytes& b) {
        put_u32(static_cast<std::uint32_t>(b.size()));
        put_bytes(b.data(), b.size());
    }

    const Bytes& data() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size)
        : data_(data), size_(size) {}
    explicit ByteReader(const Bytes& b) : ByteReader(b.data(), b.size()) {}

    std::uint8_t get_u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t get_u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(
            (std::uint16_t{data_[pos_]} << 8) | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t get_u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    std::uint64_t get_u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    std::int64_t get_i64() { return static_cast<std::int64_t>(get_u64()); }
    double get_f64() { return std::bit_cast<double>(get_u64()); }

    Bytes get_bytes(std::size_t n) {
        need(n);
        Bytes out(data_ + pos_, data_ + pos_ + n);
        pos_ += n;
        return out;
    }

    Bytes get_blob() {
        std::uint32_t n = get_u32();
        return get_bytes(n);
    }

    std::size_t remaining() const { return size_ - pos_; }
    bool done() const { return pos_ == size_; }

private:
    void need(std::size_t n) const {
        if (size_ - pos_ < n) throw WireError("buffer underrun");
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

} // namespace ftsim
