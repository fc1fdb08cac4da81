#include "ftsim/process_mode.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ftsim/clustering.hpp"
#include "ftsim/digest.hpp"
#include "ftsim/engine.hpp"
#include "ftsim/errors.hpp"
#include "ftsim/fault_inject.hpp"
#include "ftsim/lp.hpp"
#include "ftsim/net.hpp"
#include "ftsim/replication.hpp"
#include "ftsim/wire.hpp"

namespace ftsim {

namespace {

constexpr int kIoTimeoutMs = 120000;

void put_instance(ByteWriter& w, InstanceId iid) {
    w.put_i64(iid.entity);
    w.put_u16(iid.replica);
}

InstanceId get_instance(ByteReader& r) {
    InstanceId iid;
    iid.entity = r.get_i64();
    iid.replica = r.get_u16();
    return iid;
}

Bytes encode_samples(const std::vector<InteractionSample>& samples) {
    ByteWriter w;
    w.put_u32(static_cast<std::uint32_t>(samples.size()));
    for (const auto& s : samples) {
        put_instance(w, s.instance);
        w.put_u32(static_cast<std::uint32_t>(s.sent_to.size()));
        for (const auto& [lp, n] : s.sent_to) {
            w.put_u32(static_cast<std::uint32_t>(lp));
            w.put_u64(n);
        }
    }
    return w.take();
}

void decode_samples(const Bytes& body, std::vector<InteractionSample>& out) {
    ByteReader r(body);
    const std::uint32_t count = r.get_u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        InteractionSample s;
        s.instance = get_instance(r);
        const std::uint32_t edges = r.get_u32();
        for (std::uint32_t k = 0; k < edges; ++k) {
            const LpId lp = static_cast<LpId>(r.get_u32());
            s.sent_to[lp] = r.get_u64();
        }
        out.push_back(std::move(s));
    }
}

Bytes encode_payload(const MigrationPayload& p) {
    ByteWriter w;
    put_instance(w, p.instance);
    w.put_u64(p.delivered_digest);
    w.put_blob(p.state);
    w.put_u32(static_cast<std::uint32_t>(p.pending.size()));
    for (const auto& e : p.pending) {
        const Bytes frame = wire::encode(e);
        w.put_bytes(frame.data(), frame.size());
    }
    return w.take();
}

MigrationPayload decode_payload(const Bytes& body) {
    MigrationPayload p;
    ByteReader r(body);
    p.instance = get_instance(r);
    p.delivered_digest = r.get_u64();
    p.state = r.get_blob();
    const std::uint32_t pending = r.get_u32();
    std::size_t off = body.size() - r.remaining();
    for (std::uint32_t i = 0; i < pending; ++i) {
        std::size_t consumed = 0;
        p.pending.push_back(
            wire::decode(body.data() + off, body.size() - off, consumed));
        off += consumed;
    }
    return p;
}

// Control envelopes never reach a model: the connection preamble carries
// the connecting LP in send_step with seq 1, the per-step end-of-stream
// marker carries the step with seq 0.
Envelope control_envelope(std::uint64_t send_step, std::uint32_t seq) {
    Envelope e;
    e.src = InstanceId{kControlEntity, 0};
    e.dst = InstanceId{kControlEntity, 0};
    e.send_step = send_step;
    e.seq = seq;
    return e;
}

std::optional<Envelope> read_frame(net::Socket& s) {
    std::uint8_t len4[4];
    if (!s.recv_all(len4, sizeof len4)) return std::nullopt;
    ByteReader r(len4, sizeof len4);
    const std::uint32_t payload_len = r.get_u32();
    if (payload_len > wire::kMaxPayloadBytes)
        throw WireError("oversized envelope frame");
    Bytes frame(4 + wire::kHeaderBytes + payload_len);
    std::memcpy(frame.data(), len4, sizeof len4);
    if (!s.recv_all(frame.data() + 4, frame.size() - 4))
        throw NetError("peer closed mid-frame");
    return wire::decode(frame);
}

struct PeerChannel {
    LpId peer = kNoLp;
    net::Socket sock;
    Bytes outbuf;
    std::thread reader;
    std::mutex mu;
    std::condition_variable cv;
    std::int64_t eos_step = -1;
    bool failed = false;
};

class Worker : public Router {
public:
    Worker(LpId lp, std::string coordinator)
        : id_(lp), coordinator_(std::move(coordinator)) {}

    ~Worker() override {
        stopping_.store(true);
        for (auto& ch : channels_)
            if (ch) ch->sock.shutdown_rdwr();
        for (auto& ch : channels_)
            if (ch && ch->reader.joinable()) ch->reader.join();
    }

    int run() {
        control_ = net::connect_to(net::parse_endpoint(coordinator_));
        control_.set_recv_timeout(kIoTimeoutMs);
        net::Listener mesh(0);
        mesh.set_accept_timeout(kIoTimeoutMs);
        {
            ByteWriter w;
            w.put_u32(static_cast<std::uint32_t>(id_));
            w.put_u16(mesh.port());
            net::send_msg(control_, net::MsgType::hello, w.data());
        }
        setup(expect(net::MsgType::peers), mesh);
        for (Timestep t = 0; t < cfg_.total_timesteps; ++t) run_step(t);
        final_report();
        return 0;
    }

    void route(LpId dst_lp, Envelope e) override {
        if (dst_lp == id_) {
            lp_->inbox().push(std::move(e));
            return;
        }
        wire::encode(e, channels_[static_cast<std::size_t>(dst_lp)]->outbuf);
    }

    void report_failure(const std::string& what) {
        if (!control_.valid()) return;
        try {
            net::send_msg(control_, net::MsgType::crash,
                          Bytes(what.begin(), what.end()));
        } catch (...) {
        }
    }

private:
    void setup(const Bytes& peers, net::Listener& mesh) {
        ByteReader r(peers);
        const Bytes text = r.get_blob();
        cfg_ = parse_config(std::string(text.begin(), text.end()));
        const std::uint32_t l = r.get_u32();
        std::vector<std::uint16_t> ports(l);
        for (auto& p : ports) p = r.get_u16();

        model_ = make_model(cfg_);
        faults_ = FaultSchedule(cfg_.faults);
        const std::uint32_t m = cfg_.replication_degree();
        placement_ = place_instances(cfg_.num_entities, m, cfg_.num_lps);
        lp_ = std::make_unique<LpRuntime>(id_, cfg_);
        for (std::uint64_t e = 0; e < cfg_.num_entities; ++e) {
            const std::uint64_t seed =
                seed_for(cfg_.seed, static_cast<EntityId>(e));
            for (std::uint32_t j = 0; j < m; ++j) {
                InstanceId iid{static_cast<EntityId>(e),
                               static_cast<std::uint16_t>(j)};
                if (placement_.lp_of(iid) == id_)
                    lp_->add_instance(iid,
                                      model_->create_entity(iid.entity, seed));
            }
        }

        channels_.resize(l);
        for (LpId v = 0; v < static_cast<LpId>(l); ++v) {
            if (v >= id_) break;
            auto ch = std::make_unique<PeerChannel>();
            ch->peer = v;
            ch->sock = net::connect_to(
                {"127.0.0.1", ports[static_cast<std::size_t>(v)]});
            ch->sock.set_recv_timeout(kIoTimeoutMs);
            ch->sock.send_all(wire::encode(
                control_envelope(static_cast<std::uint64_t>(id_), 1)));
            channels_[static_cast<std::size_t>(v)] = std::move(ch);
        }
        for (std::uint32_t i = static_cast<std::uint32_t>(id_) + 1; i < l;
             ++i) {
            net::Socket s = mesh.accept();
            s.set_recv_timeout(kIoTimeoutMs);
            const auto pre = read_frame(s);
            if (!pre || pre->src.entity != kControlEntity || pre->seq != 1)
                throw NetError("bad mesh preamble");
            const LpId peer = static_cast<LpId>(pre->send_step);
            if (peer <= id_ || peer >= static_cast<LpId>(l) ||
                channels_[static_cast<std::size_t>(peer)])
                throw NetError("mesh preamble names a bad peer");
            auto ch = std::make_unique<PeerChannel>();
            ch->peer = peer;
            ch->sock = std::move(s);
            channels_[static_cast<std::size_t>(peer)] = std::move(ch);
        }
        mesh.close();
        for (auto& ch : channels_)
            if (ch) ch->reader = std::thread(&Worker::reader_loop, this,
                                             ch.get());
    }

    void run_step(Timestep t) {
        for (LpId lp : faults_.crashes_at(t))
            if (crashed_.insert(lp).second && lp == id_) lp_->crash();

        Bytes release;
        if (cfg_.migration_enabled && t > 0 &&
            t % cfg_.migration_period == 0) {
            std::vector<InteractionSample> samples;
            if (lp_->status() != LpStatus::crashed)
                samples = lp_->harvest_window();
            net::send_msg(control_, net::MsgType::state,
                          encode_samples(samples));
            release = migration_exchange();
        } else {
            release = expect(net::MsgType::release);
        }
        apply_release(t, release);

        if (lp_->status() != LpStatus::crashed) {
            try {
                lp_->execute_step(t, *this, placement_, crashed_, faults_);
            } catch (const SimAbort&) {
                throw;
            } catch (const std::exception& ex) {
                throw SimAbort(std::string("model handler failed at step ") +
                               std::to_string(t) + ": " + ex.what());
            }
            flush_step(t);
            wait_eos(t);
        }
        ByteWriter done;
        done.put_u64(t);
        net::send_msg(control_, net::MsgType::done, done.data());
    }

    Bytes migration_exchange() {
        for (;;) {
            net::MsgType type;
            Bytes body;
            if (!net::recv_msg(control_, type, body))
                throw NetError("coordinator disconnected");
            switch (type) {
            case net::MsgType::emigrate: {
                ByteReader r(body);
                const InstanceId iid = get_instance(r);
                net::send_msg(control_, net::MsgType::emigrate,
                              encode_payload(lp_->extract_instance(iid)));
                break;
            }
            case net::MsgType::install: {
                MigrationPayload p = decode_payload(body);
                auto entity = model_->create_entity(
                    p.instance.entity, seed_for(cfg_.seed, p.instance.entity));
                entity->restore(p.state);
                lp_->install_instance(p.instance, std::move(entity),
                                      p.delivered_digest,
                                      std::move(p.pending));
                break;
            }
            case net::MsgType::release:
                return body;
            default:
                throw NetError("unexpected control message");
            }
        }
    }

    void apply_release(Timestep t, const Bytes& body) {
        ByteReader r(body);
        if (r.get_u64() != t) throw NetError("barrier out of sync");
        const std::uint32_t moves = r.get_u32();
        for (std::uint32_t i = 0; i < moves; ++i) {
            const InstanceId iid = get_instance(r);
            placement_.set_lp(iid, static_cast<LpId>(r.get_u32()));
        }
    }

    void flush_step(Timestep t) {
        const Envelope eos = control_envelope(t, 0);
        for (auto& ch : channels_) {
            if (!ch) continue;
            wire::encode(eos, ch->outbuf);
            ch->sock.send_all(ch->outbuf);
            ch->outbuf.clear();
        }
    }

    void wait_eos(Timestep t) {
        for (auto& ch : channels_) {
            if (!ch || crashed_.count(ch->peer)) continue;
            std::unique_lock<std::mutex> lock(ch->mu);
            ch->cv.wait(lock, [&] {
                return ch->failed ||
                       ch->eos_step >= static_cast<std::int64_t>(t);
            });
            if (ch->failed)
                throw SimAbort("lp " + std::to_string(id_) +
                               " lost contact with lp " +
                               std::to_string(ch->peer));
        }
    }

    void reader_loop(PeerChannel* ch) {
        try {
            for (;;) {
                auto e = read_frame(ch->sock);
                if (!e) break;
                if (e->src.entity == kControlEntity) {
                    if (e->seq == 0) {
                        std::lock_guard<std::mutex> lock(ch->mu);
                        ch->eos_step = static_cast<std::int64_t>(e->send_step);
                        ch->cv.notify_all();
                    }
                    continue;
                }
                lp_->inbox().push(std::move(*e));
            }
        } catch (...) {
        }
        if (!stopping_.load()) {
            std::lock_guard<std::mutex> lock(ch->mu);
            ch->failed = true;
            ch->cv.notify_all();
        }
    }

    void final_report() {
        expect(net::MsgType::final_report);
        lp_->finalize_counters();
        ByteWriter w;
        const LpCounters& c = lp_->counters();
        w.put_u64(c.sent);
        w.put_u64(c.received);
        w.put_u64(c.delivered);
        w.put_u64(c.dedup_dropped);
        w.put_u64(c.equivocal_dropped);
        w.put_u64(c.quorum_held_peak);
        w.put_u64(c.quorum_expired);
        w.put_u64(c.quorum_residual);
        w.put_u64(c.inbox_pending);
        w.put_u64(c.lost_to_crash);
        w.put_u64(c.suppressed_to_crashed);
        w.put_u64(c.corrupt_delivered);
        w.put_u64(c.unmatched_pong);
        w.put_u32(static_cast<std::uint32_t>(lp_->instances().size()));
        for (const auto& [iid, rec] : lp_->instances()) {
            put_instance(w, iid);
            const Bytes snap = rec.entity->snapshot();
            w.put_u64(fnv1a64(snap.data(), snap.size()));
            w.put_u64(rec.delivered_digest.value());
        }
        net::send_msg(control_, net::MsgType::final_report, w.data());
        expect(net::MsgType::stop);
        stopping_.store(true);
        for (auto& ch : channels_)
            if (ch) ch->sock.shutdown_write();
    }

    Bytes expect(net::MsgType want) {
        net::MsgType type;
        Bytes body;
        if (!net::recv_msg(control_, type, body))
            throw NetError("coordinator disconnected");
        if (type != want) throw NetError("unexpected control message");
        return body;
    }

    LpId id_;
    std::string coordinator_;
    net::Socket control_;
    SimConfig cfg_;
    std::unique_ptr<Model> model_;
    FaultSchedule faults_;
    PlacementMap placement_;
    std::unique_ptr<LpRuntime> lp_;
    std::vector<std::unique_ptr<PeerChannel>> channels_;
    std::set<LpId> crashed_;
    std::atomic<bool> stopping_{false};
};

// Kills and reaps whatever is still running when the coordinator unwinds.
class ChildGuard {
public:
    ChildGuard() = default;
    ChildGuard(const ChildGuard&) = delete;
    ChildGuard& operator=(const ChildGuard&) = delete;

    ~ChildGuard() {
        for (pid_t pid : pids_) {
            if (pid <= 0) continue;
            ::kill(pid, SIGKILL);
            ::waitpid(pid, nullptr, 0);
        }
    }

    void add(pid_t pid) { pids_.push_back(pid); }

    bool reap_clean() {
        bool ok = true;
        for (pid_t& pid : pids_) {
            if (pid <= 0) continue;
            int status = 0;
            if (::waitpid(pid, &status, 0) != pid || !WIFEXITED(status) ||
                WEXITSTATUS(status) != 0)
                ok = false;
            pid = 0;
        }
        return ok;
    }

private:
    std::vector<pid_t> pids_;
};

Bytes expect_from(net::Socket& s, net::MsgType want) {
    net::MsgType type;
    Bytes body;
    if (!net::recv_msg(s, type, body))
        throw SimAbort("lp worker disconnected mid-run");
    if (type == net::MsgType::crash)
        throw SimAbort(std::string(body.begin(), body.end()));
    if (type != want)
        throw SimAbort("unexpected control message from worker");
    return body;
}

SimReport coordinate(const SimConfig& cfg, std::vector<net::Socket>& control,
                     ChildGuard& guard,
                     std::chrono::steady_clock::time_point t0) {
    const std::uint32_t l = cfg.num_lps;
    const std::uint32_t m = cfg.replication_degree();
    PlacementMap placement = place_instances(cfg.num_entities, m, l);
    const FaultSchedule faults(cfg.faults);
    std::set<LpId> crashed;
    SimReport report;
    report.config = cfg;
    report.seed = cfg.seed;

    for (Timestep t = 0; t < cfg.total_timesteps; ++t) {
        for (LpId lp : faults.crashes_at(t)) crashed.insert(lp);

        ByteWriter release;
        release.put_u64(t);
        if (cfg.migration_enabled && t > 0 &&
            t % cfg.migration_period == 0) {
            std::vector<InteractionSample> samples;
            for (std::uint32_t w = 0; w < l; ++w)
                decode_samples(expect_from(control[w], net::MsgType::state),
                               samples);
            const auto decisions = evaluate_migrations(
                samples, placement, crashed, cfg.migration_threshold,
                cfg.instance_cap_effective());
            ByteWriter moves;
            std::uint32_t applied = 0;
            for (const auto& d : decisions) {
                if (placement.lp_of(d.instance) != d.from ||
                    crashed.count(d.to) ||
                    placement.entity_has_instance_on(d.instance.entity,
                                                     d.to)) {
                    ++report.migrations_skipped;
                    continue;
                }
                ByteWriter req;
                put_instance(req, d.instance);
                net::send_msg(control[static_cast<std::size_t>(d.from)],
                              net::MsgType::emigrate, req.data());
                const Bytes payload =
                    expect_from(control[static_cast<std::size_t>(d.from)],
                                net::MsgType::emigrate);
                net::send_msg(control[static_cast<std::size_t>(d.to)],
                              net::MsgType::install, payload);
                placement.set_lp(d.instance, d.to);
                put_instance(moves, d.instance);
                moves.put_u32(static_cast<std::uint32_t>(d.to));
                ++applied;
                ++report.migrations_applied;
            }
            placement.epoch += 1;
            release.put_u32(applied);
            release.put_bytes(moves.data().data(), moves.data().size());
        } else {
            release.put_u32(0);
        }

        for (auto& s : control)
            net::send_msg(s, net::MsgType::release, release.data());
        for (std::uint32_t w = 0; w < l; ++w) {
            const Bytes body = expect_from(control[w], net::MsgType::done);
            ByteReader r(body);
            if (r.get_u64() != t)
                throw SimAbort("worker barrier out of sync");
        }
    }

    std::vector<std::map<InstanceId,
                         std::pair<std::uint64_t, std::uint64_t>>>
        digests(l);
    for (auto& s : control)
        net::send_msg(s, net::MsgType::final_report, {});
    for (std::uint32_t w = 0; w < l; ++w) {
        const Bytes body = expect_from(control[w], net::MsgType::final_report);
        ByteReader r(body);
        LpCounters c;
        c.sent = r.get_u64();
        c.received = r.get_u64();
        c.delivered = r.get_u64();
        c.dedup_dropped = r.get_u64();
        c.equivocal_dropped = r.get_u64();
        c.quorum_held_peak = r.get_u64();
        c.quorum_expired = r.get_u64();
        c.quorum_residual = r.get_u64();
        c.inbox_pending = r.get_u64();
        c.lost_to_crash = r.get_u64();
        c.suppressed_to_crashed = r.get_u64();
        c.corrupt_delivered = r.get_u64();
        c.unmatched_pong = r.get_u64();
        report.lps.push_back(c);
        const std::uint32_t n = r.get_u32();
        for (std::uint32_t i = 0; i < n; ++i) {
            const InstanceId iid = get_instance(r);
            const std::uint64_t state = r.get_u64();
            const std::uint64_t delivered = r.get_u64();
            digests[w][iid] = {state, delivered};
        }
    }
    for (auto& s : control) net::send_msg(s, net::MsgType::stop, {});
    if (!guard.reap_clean()) throw SimAbort("lp worker exited uncleanly");

    for (std::uint64_t e = 0; e < cfg.num_entities; ++e) {
        EntityResult er;
        er.id = static_cast<EntityId>(e);
        std::uint64_t first_state = 0;
        std::uint64_t first_delivered = 0;
        for (std::uint32_t j = 0; j < m; ++j) {
            InstanceId iid{er.id, static_cast<std::uint16_t>(j)};
            const LpId lp = placement.lp_of(iid);
            if (crashed.count(lp)) continue;
            const auto& hosted = digests[static_cast<std::size_t>(lp)];
            const auto it = hosted.find(iid);
            if (it == hosted.end())
                throw SimAbort("placement names an instance its LP does "
                               "not host");
            if (er.live_replicas == 0) {
                first_state = it->second.first;
                first_delivered = it->second.second;
            } else if (cfg.check_replica_consistency &&
                       (it->second.first != first_state ||
                        it->second.second != first_delivered)) {
                er.replicas_consistent = false;
            }
            ++er.live_replicas;
        }
        er.state_digest = first_state;
        er.delivered_digest = first_delivered;
        report.entities.push_back(er);
    }

    report.placement_epochs = placement.epoch;
    report.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return report;
}

} // namespace

SimReport run_processes(const SimConfig& cfg) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint32_t l = cfg.num_lps;

    net::Listener listener(0);
    listener.set_accept_timeout(kIoTimeoutMs);
    const std::string endpoint =
        "127.0.0.1:" + std::to_string(listener.port());

    std::fflush(stdout);
    std::fflush(stderr);
    ChildGuard guard;
    for (std::uint32_t w = 0; w < l; ++w) {
        const pid_t pid = ::fork();
        if (pid < 0) throw SimAbort("fork failed for lp worker");
        if (pid == 0) {
            listener.close();
            ::_exit(worker_main(static_cast<LpId>(w), endpoint));
        }
        guard.add(pid);
    }

    try {
        std::vector<net::Socket> control(l);
        std::vector<std::uint16_t> eport(l, 0);
        for (std::uint32_t i = 0; i < l; ++i) {
            net::Socket s = listener.accept();
            s.set_recv_timeout(kIoTimeoutMs);
            const Bytes body = expect_from(s, net::MsgType::hello);
            ByteReader r(body);
            const std::uint32_t w = r.get_u32();
            const std::uint16_t port = r.get_u16();
            if (w >= l || control[w].valid())
                throw SimAbort("bad hello from lp worker");
            eport[w] = port;
            control[w] = std::move(s);
        }
        listener.close();

        ByteWriter peers;
        const std::string text = serialize_config(cfg);
        peers.put_u32(static_cast<std::uint32_t>(text.size()));
        peers.put_bytes(text.data(), text.size());
        peers.put_u32(l);
        for (const auto p : eport) peers.put_u16(p);
        for (auto& s : control)
            net::send_msg(s, net::MsgType::peers, peers.data());

        return coordinate(cfg, control, guard, t0);
    } catch (const NetError& ex) {
        throw SimAbort(std::string("process transport failed: ") + ex.what());
    } catch (const WireError& ex) {
        throw SimAbort(std::string("process transport failed: ") + ex.what());
    }
}

int worker_main(LpId lp, const std::string& coordinator_endpoint) {
    Worker w(lp, coordinator_endpoint);
    try {
        return w.run();
    } catch (const std::exception& ex) {
        w.report_failure(ex.what());
        return 1;
    } catch (...) {
        return 1;
    }
}

} // namespace ftsim
