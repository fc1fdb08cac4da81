#include "ftsim/lp.hpp"

#include <algorithm>
#include <tuple>

#include "ftsim/errors.hpp"

namespace ftsim {

namespace {

bool envelope_before(const Envelope& a, const Envelope& b) {
    auto ka = std::tie(a.src.entity, a.src.replica, a.send_step, a.seq,
                       a.dst.entity, a.dst.replica);
    auto kb = std::tie(b.src.entity, b.src.replica, b.send_step, b.seq,
                       b.dst.entity, b.dst.replica);
    if (ka != kb) return ka < kb;
    return a.payload < b.payload;
}

} // namespace

// Routes one instance's emissions for the current step: assigns sequence
// numbers, fans out to all destination replicas, applies the LP's active
// corruption, counts and routes each copy.
class StepSink : public EmissionSink {
public:
    StepSink(LpRuntime& lp, InstanceId src, InstanceRec& rec, Timestep t,
             Router& router, const PlacementMap& placement,
             const std::set<LpId>& crashed,
             std::optional<CorruptionMode> corruption)
        : lp_(lp),
          src_(src),
          rec_(rec),
          t_(t),
          router_(router),
          placement_(placement),
          crashed_(crashed),
          corruption_(corruption) {}

    void send(Emission em) override {
        Envelope logical;
        logical.src = src_;
        logical.dst = {em.dst, 0};
        logical.send_step = t_;
        logical.delivery_step = t_ + std::max<Timestep>(em.delay, 1);
        logical.seq = rec_.step_seq++;
        logical.payload = std::move(em.payload);

        auto copies = fan_out(logical, placement_.replicas());
        for (auto& copy : copies) {
            if (corruption_) {
                for (auto& final_copy : corrupt(copy, *corruption_))
                    route_copy(std::move(final_copy));
            } else {
                route_copy(std::move(copy));
            }
        }
    }

    void note_unmatched() override { ++lp_.counters_.unmatched_pong; }

private:
    void route_copy(Envelope e) {
        const LpId dst_lp = placement_.lp_of(e.dst);
        ++lp_.counters_.sent;
        ++rec_.window_sent[dst_lp];
        if (crashed_.count(dst_lp)) {
            ++lp_.counters_.suppressed_to_crashed;
            return;
        }
        router_.route(dst_lp, std::move(e));
    }

    LpRuntime& lp_;
    InstanceId src_;
    InstanceRec& rec_;
    Timestep t_;
    Router& router_;
    const PlacementMap& placement_;
    const std::set<LpId>& crashed_;
    std::optional<CorruptionMode> corruption_;
};

void LpRuntime::add_instance(InstanceId iid,
                             std::unique_ptr<Entity> entity) {
    for (const auto& [other, rec] : instances_)
        if (other.entity == iid.entity)
            throw PlacementError(
                "two instances of one entity on the same LP");
    InstanceRec rec;
    rec.entity = std::move(entity);
    instances_.emplace(iid, std::move(rec));
}

const InstanceRec* LpRuntime::find_instance(InstanceId iid) const {
    auto it = instances_.find(iid);
    return it == instances_.end() ? nullptr : &it->second;
}

void LpRuntime::execute_step(Timestep t, Router& router,
                             const PlacementMap& placement,
                             const std::set<LpId>& crashed,
                             const FaultSchedule& faults) {
    if (status_ == LpStatus::crashed) return;
    const auto corruption = faults.corruption_for(id_, t);

    for (auto& [iid, rec] : instances_) rec.step_seq = 0;

    auto bucket = inbox_.take(t);
    counters_.received += bucket.size();
    std::sort(bucket.begin(), bucket.end(), envelope_before);

    for (const Envelope& e : bucket) {
        if (e.delivery_step != t)
            throw SimAbort("envelope surfaced outside its delivery step");
        auto it = instances_.find(e.dst);
        if (it == instances_.end())
            throw SimAbort("envelope routed to an LP not hosting its "
                           "destination instance");
        InstanceRec& rec = it->second;

        FilterResult res;
        if (cfg_->policy.mode == FailureMode::byzantine)
            res = buffer_.filter_byzantine(e, cfg_->policy.f);
        else
            res = buffer_.filter_crash(e);

        counters_.dedup_dropped += res.dedup_drops;
        if (res.outcome == FilterOutcome::drop_equivocal)
            ++counters_.equivocal_dropped;
        if (res.outcome != FilterOutcome::deliver) continue;

        ++counters_.delivered;
        const Bytes& payload = *res.payload;
        if (!rec.entity->payload_plausible(payload))
            ++counters_.corrupt_delivered;
        rec.delivered_digest.update_i64(e.src.entity);
        rec.delivered_digest.update_u64(e.send_step);
        rec.delivered_digest.update_u32(e.seq);
        rec.delivered_digest.update_u64(payload.size());
        rec.delivered_digest.update(payload.data(), payload.size());

        StepSink sink(*this, e.dst, rec, t, router, placement, crashed,
                      corruption);
        rec.entity->on_deliver({e.src.entity, e.send_step, t}, payload,
                               sink);
    }

    for (auto& [iid, rec] : instances_) {
        StepSink sink(*this, iid, rec, t, router, placement, crashed,
                      corruption);
        rec.entity->on_tick(t, sink);
    }

    counters_.quorum_held_peak =
        std::max(counters_.quorum_held_peak, buffer_.held_entries());
    const auto flushed = buffer_.flush_expired(t, cfg_->quorum_grace);
    counters_.quorum_expired += flushed.expired_copies;
}

void LpRuntime::crash() {
    status_ = LpStatus::crashed;
    const std::uint64_t discarded = inbox_.discard_all();
    counters_.received += discarded;
    counters_.lost_to_crash += discarded;
    counters_.quorum_residual += buffer_.residual_copies();
    buffer_.clear();
}

std::vector<InteractionSample> LpRuntime::harvest_window() {
    std::vector<InteractionSample> samples;
    for (auto& [iid, rec] : instances_) {
        if (rec.window_sent.empty()) continue;
        samples.push_back({iid, std::move(rec.window_sent)});
        rec.window_sent.clear();
    }
    return samples;
}

MigrationPayload LpRuntime::extract_instance(InstanceId iid) {
    auto it = instances_.find(iid);
    if (it == instances_.end())
        throw PlacementError("migrating instance not hosted here");
    MigrationPayload payload;
    payload.instance = iid;
    payload.state = it->second.entity->snapshot();
    payload.delivered_digest = it->second.delivered_digest.value();
    payload.pending = inbox_.extract_instance(iid);
    counters_.quorum_expired += buffer_.drop_instance(iid);
    instances_.erase(it);
    return payload;
}

void LpRuntime::install_instance(InstanceId iid,
                                 std::unique_ptr<Entity> entity,
                                 std::uint64_t delivered_digest,
                                 std::vector<Envelope> pending) {
    add_instance(iid, std::move(entity));
    instances_.at(iid).delivered_digest.set_value(delivered_digest);
    for (auto& e : pending) inbox_.push(std::move(e));
}

void LpRuntime::finalize_counters() {
    if (status_ == LpStatus::crashed) return;
    counters_.inbox_pending += inbox_.pending();
    counters_.quorum_residual += buffer_.residual_copies();
}

} // namespace ftsim
