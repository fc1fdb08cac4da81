#include "ftsim/engine.hpp"

#include <chrono>
#include <exception>
#include <set>
#include <thread>

#include "ftsim/clustering.hpp"
#include "ftsim/digest.hpp"
#include "ftsim/errors.hpp"
#include "ftsim/fault_inject.hpp"
#include "ftsim/lp.hpp"
#include "ftsim/p2p_model.hpp"
#include "ftsim/process_mode.hpp"
#include "ftsim/replication.hpp"

namespace ftsim {

namespace {

class InProcRouter : public Router {
public:
    explicit InProcRouter(std::vector<std::unique_ptr<LpRuntime>>& lps)
        : lps_(lps) {}

    void route(LpId dst_lp, Envelope e) override {
        lps_[static_cast<std::size_t>(dst_lp)]->inbox().push(std::move(e));
    }

private:
    std::vector<std::unique_ptr<LpRuntime>>& lps_;
};

void run_step_threads(std::vector<std::unique_ptr<LpRuntime>>& lps,
                      Timestep t, Router& router,
                      const PlacementMap& placement,
                      const std::set<LpId>& crashed,
                      const FaultSchedule& faults) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(lps.size());
    for (std::size_t i = 0; i < lps.size(); ++i) {
        if (lps[i]->status() == LpStatus::crashed) continue;
        workers.emplace_back([&, i] {
            try {
                lps[i]->execute_step(t, router, placement, crashed, faults);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

void migration_round(const SimConfig& cfg, Model& model,
                     std::vector<std::unique_ptr<LpRuntime>>& lps,
                     PlacementMap& placement, const std::set<LpId>& crashed,
                     SimReport& report) {
    std::vector<InteractionSample> samples;
    for (auto& lp : lps) {
        if (lp->status() == LpStatus::crashed) continue;
        auto part = lp->harvest_window();
        for (auto& s : part) samples.push_back(std::move(s));
    }
    const auto decisions =
        evaluate_migrations(samples, placement, crashed,
                            cfg.migration_threshold,
                            cfg.instance_cap_effective());
    for (const auto& d : decisions) {
        if (placement.lp_of(d.instance) != d.from || crashed.count(d.to) ||
            placement.entity_has_instance_on(d.instance.entity, d.to)) {
            ++report.migrations_skipped;
            continue;
        }
        auto payload =
            lps[static_cast<std::size_t>(d.from)]->extract_instance(
                d.instance);
        auto entity = model.create_entity(
            d.instance.entity, seed_for(cfg.seed, d.instance.entity));
        entity->restore(payload.state);
        lps[static_cast<std::size_t>(d.to)]->install_instance(
            d.instance, std::move(entity), payload.delivered_digest,
            std::move(payload.pending));
        placement.set_lp(d.instance, d.to);
        ++report.migrations_applied;
    }
    placement.epoch += 1;
}

void record_digests(const std::vector<std::unique_ptr<LpRuntime>>& lps,
                    DigestStreams& streams) {
    for (const auto& lp : lps) {
        if (lp->status() == LpStatus::crashed) continue;
        for (const auto& [iid, rec] : lp->instances()) {
            const Bytes snap = rec.entity->snapshot();
            streams.state[iid].push_back(
                fnv1a64(snap.data(), snap.size()));
        }
    }
}

} // namespace

std::unique_ptr<Model> make_model(const SimConfig& cfg) {
    return std::make_unique<P2PModel>(cfg.p2p, cfg.num_entities, cfg.seed);
}

SimReport run_in_process(const SimConfig& cfg, Model& model,
                         DigestStreams* streams) {
    validate(cfg);
    if (cfg.exec_mode == ExecMode::processes)
        throw ConfigError("process mode runs through run_simulation");
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint32_t m = cfg.replication_degree();
    PlacementMap placement =
        place_instances(cfg.num_entities, m, cfg.num_lps);
    const FaultSchedule faults(cfg.faults);

    std::vector<std::unique_ptr<LpRuntime>> lps;
    lps.reserve(cfg.num_lps);
    for (std::uint32_t i = 0; i < cfg.num_lps; ++i)
        lps.push_back(
            std::make_unique<LpRuntime>(static_cast<LpId>(i), cfg));

    for (std::uint64_t e = 0; e < cfg.num_entities; ++e) {
        const std::uint64_t seed = seed_for(cfg.seed, static_cast<EntityId>(e));
        for (std::uint32_t j = 0; j < m; ++j) {
            InstanceId iid{static_cast<EntityId>(e),
                           static_cast<std::uint16_t>(j)};
            lps[static_cast<std::size_t>(placement.lp_of(iid))]
                ->add_instance(iid, model.create_entity(iid.entity, seed));
        }
    }

    InProcRouter router(lps);
    std::set<LpId> crashed;
    SimReport report;
    report.config = cfg;
    report.seed = cfg.seed;

    for (Timestep t = 0; t < cfg.total_timesteps; ++t) {
        for (LpId lp : faults.crashes_at(t))
            if (crashed.insert(lp).second)
                lps[static_cast<std::size_t>(lp)]->crash();
        if (cfg.migration_enabled && t > 0 && t % cfg.migration_period == 0)
            migration_round(cfg, model, lps, placement, crashed, report);

        try {
            if (cfg.exec_mode == ExecMode::threads)
                run_step_threads(lps, t, router, placement, crashed, faults);
            else
                for (auto& lp : lps)
                    lp->execute_step(t, router, placement, crashed, faults);
        } catch (const SimAbort&) {
            throw;
        } catch (const std::exception& ex) {
            throw SimAbort(std::string("model handler failed at step ") +
                           std::to_string(t) + ": " + ex.what());
        }

        if (streams) record_digests(lps, *streams);
    }

    for (auto& lp : lps) {
        lp->finalize_counters();
        report.lps.push_back(lp->counters());
    }

    for (std::uint64_t e = 0; e < cfg.num_entities; ++e) {
        EntityResult er;
        er.id = static_cast<EntityId>(e);
        std::uint64_t first_state = 0;
        std::uint64_t first_delivered = 0;
        for (std::uint32_t j = 0; j < m; ++j) {
            InstanceId iid{er.id, static_cast<std::uint16_t>(j)};
            const LpId lp = placement.lp_of(iid);
            if (crashed.count(lp)) continue;
            const InstanceRec* rec =
                lps[static_cast<std::size_t>(lp)]->find_instance(iid);
            if (!rec)
                throw SimAbort("placement names an instance its LP does "
                               "not host");
            const Bytes snap = rec->entity->snapshot();
            const std::uint64_t state = fnv1a64(snap.data(), snap.size());
            const std::uint64_t delivered = rec->delivered_digest.value();
            if (er.live_replicas == 0) {
                first_state = state;
                first_delivered = delivered;
            } else if (cfg.check_replica_consistency &&
                       (state != first_state ||
                        delivered != first_delivered)) {
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

SimReport run_simulation(const SimConfig& cfg) {
    if (cfg.exec_mode == ExecMode::processes) return run_processes(cfg);
    auto model = make_model(cfg);
    return run_in_process(cfg, *model);
}

} // namespace ftsim
