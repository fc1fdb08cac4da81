#pragma once

#include <cstdint>
#include <string>

#include "ftsim/bytes.hpp"

namespace ftsim::net {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& text); // "host:port"

// RAII stream socket with whole-buffer send/receive semantics.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

    void send_all(const void* data, std::size_t n); // throws NetError
    void send_all(const Bytes& b) { send_all(b.data(), b.size()); }

    // Fills exactly n bytes. Returns false on clean EOF before the first
    // byte; throws NetError on EOF mid-message or on errors.
    bool recv_all(void* data, std::size_t n);

    // Bounds blocking receives so a silent peer becomes a NetError
    // instead of a hang. 0 disables the bound.
    void set_recv_timeout(int ms);

    void shutdown_write();
    void shutdown_rdwr(); // wakes a thread blocked in recv_all
    void close();

private:
    int fd_ = -1;
};

class Listener {
public:
    // port 0 binds an ephemeral port; port() reports the bound one.
    explicit Listener(std::uint16_t port,
                      const std::string& host = "127.0.0.1");
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const { return port_; }
    Socket accept();
    void set_accept_timeout(int ms);
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Connects with retry/backoff to ride out peer start-up races.
Socket connect_to(const Endpoint& ep, int attempts = 50,
                  int backoff_ms = 20);

// Control-channel framing: u32 length (big-endian), u8 message type, body.
enum class MsgType : std::uint8_t {
    hello = 1,        // worker -> coordinator: LpId, envelope listener port
    peers = 2,        // coordinator -> worker: config text + endpoint table
    release = 3,      // coordinator -> worker: run step t + placement moves
    done = 4,         // worker -> coordinator: step t finished
    emigrate = 5,     // coordinator requests an instance; worker replies
                      // with the serialized migration payload
    state = 6,        // worker -> coordinator: harvested window samples
    install = 7,      // coordinator -> worker: install shipped instance
    crash = 8,        // worker -> coordinator: fatal error text
    final_report = 9, // request (empty) / reply (counters + digests)
    stop = 10,        // coordinator -> worker: exit cleanly
};

void send_msg(Socket& s, MsgType type, const Bytes& body);

// Returns false on clean EOF at a message boundary.
bool recv_msg(Socket& s, MsgType& type, Bytes& body);

} // namespace ftsim::net
