#include "ftsim/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "ftsim/errors.hpp"

namespace ftsim::net {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw NetError(what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw NetError("bad IPv4 address: " + host);
    return addr;
}

void set_rcvtimeo(int fd, int ms) {
    timeval tv{};
    tv.tv_sec = ms / 1000;
    tv.tv_usec = (ms % 1000) * 1000;
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

} // namespace

Endpoint parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos)
        throw NetError("endpoint must be host:port: " + text);
    Endpoint ep;
    ep.host = text.substr(0, colon);
    try {
        ep.port = static_cast<std::uint16_t>(
            std::stoul(text.substr(colon + 1)));
    } catch (const std::exception&) {
        throw NetError("bad port in endpoint: " + text);
    }
    return ep;
}

Socket::~Socket() { close(); }

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::send_all(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    while (n > 0) {
        ssize_t sent = ::send(fd_, p, n, MSG_NOSIGNAL);
        if (sent < 0) {
            if (errno == EINTR) continue;
            fail("send");
        }
        p += sent;
        n -= static_cast<std::size_t>(sent);
    }
}

void Socket::set_recv_timeout(int ms) {
    if (fd_ >= 0) set_rcvtimeo(fd_, ms);
}

bool Socket::recv_all(void* data, std::size_t n) {
    auto* p = static_cast<std::uint8_t*>(data);
    std::size_t got = 0;
    while (got < n) {
        ssize_t r = ::recv(fd_, p + got, n - got, 0);
        if (r < 0) {
            if (errno == EINTR) continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw NetError("receive timed out: peer went silent");
            fail("recv");
        }
        if (r == 0) {
            if (got == 0) return false;
            throw NetError("connection closed mid-message");
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

void Socket::shutdown_write() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void Socket::shutdown_rdwr() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Listener::Listener(std::uint16_t port, const std::string& host) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) fail("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = make_addr(host, port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
        fail("bind");
    if (::listen(fd_, 64) < 0) fail("listen");
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0)
        fail("getsockname");
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() { close(); }

void Listener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Listener::set_accept_timeout(int ms) {
    if (fd_ >= 0) set_rcvtimeo(fd_, ms);
}

Socket Listener::accept() {
    while (true) {
        int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw NetError("accept timed out: worker never connected");
            fail("accept");
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return Socket(fd);
    }
}

Socket connect_to(const Endpoint& ep, int attempts, int backoff_ms) {
    sockaddr_in addr = make_addr(ep.host, ep.port);
    for (int attempt = 0;; ++attempt) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) fail("socket");
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr),
                      sizeof addr) == 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return Socket(fd);
        }
        ::close(fd);
        if (attempt + 1 >= attempts)
            throw NetError("cannot connect to " + ep.host + ":" +
                           std::to_string(ep.port) + ": " +
                           std::strerror(errno));
        std::this_thread::sleep_for(
            std::chrono::milliseconds(backoff_ms));
    }
}

void send_msg(Socket& s, MsgType type, const Bytes& body) {
    ByteWriter w;
    w.put_u32(static_cast<std::uint32_t>(body.size()));
    w.put_u8(static_cast<std::uint8_t>(type));
    w.put_bytes(body.data(), body.size());
    s.send_all(w.data());
}

bool recv_msg(Socket& s, MsgType& type, Bytes& body) {
    std::uint8_t header[5];
    if (!s.recv_all(header, sizeof header)) return false;
    ByteReader r(header, sizeof header);
    const std::uint32_t len = r.get_u32();
    type = static_cast<MsgType>(r.get_u8());
    body.resize(len);
    if (len > 0 && !s.recv_all(body.data(), len))
        throw NetError("connection closed mid-message");
    return true;
}

} // namespace ftsim::net
