#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "ftsim/envelope.hpp"
#include "ftsim/types.hpp"

namespace ftsim {

// Per-LP inbound queue, bucketed by delivery step. Multiple producer LPs
// may push concurrently; only the owning LP takes. Determinism does not
// depend on arrival order — the LP sorts each bucket before processing.
class Inbox {
public:
    void push(Envelope e) {
        std::lock_guard<std::mutex> lock(mu_);
        buckets_[e.delivery_step].push_back(std::move(e));
    }

    std::vector<Envelope> take(Timestep t) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = buckets_.find(t);
        if (it == buckets_.end()) return {};
        std::vector<Envelope> out = std::move(it->second);
        buckets_.erase(it);
        return out;
    }

    std::uint64_t pending() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::uint64_t n = 0;
        for (const auto& [step, bucket] : buckets_) n += bucket.size();
        return n;
    }

    std::uint64_t discard_all() {
        std::lock_guard<std::mutex> lock(mu_);
        std::uint64_t n = 0;
        for (const auto& [step, bucket] : buckets_) n += bucket.size();
        buckets_.clear();
        return n;
    }

    // Removes and returns all queued envelopes addressed to one instance
    // (forwarded to the new host when the instance migrates).
    std::vector<Envelope> extract_instance(InstanceId dst) {
        std::lock_guard<std::mutex> lock(mu_);
        std::vector<Envelope> out;
        for (auto it = buckets_.begin(); it != buckets_.end();) {
            auto& bucket = it->second;
            for (auto e = bucket.begin(); e != bucket.end();) {
                if (e->dst == dst) {
                    out.push_back(std::move(*e));
                    e = bucket.erase(e);
                } else {
                    ++e;
                }
            }
            if (bucket.empty()) it = buckets_.erase(it);
            else ++it;
        }
        return out;
    }

private:
    mutable std::mutex mu_;
    std::map<Timestep, std::vector<Envelope>> buckets_;
};

// Delivers an envelope to the LP hosting its destination. In-process modes
// push straight into the destination inbox; process mode serializes remote
// envelopes onto the peer's socket.
class Router {
public:
    virtual ~Router() = default;
    virtual void route(LpId dst_lp, Envelope e) = 0;
};

} // namespace ftsim
