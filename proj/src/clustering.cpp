#include "ftsim/clustering.hpp"

#include <algorithm>

namespace ftsim {

std::vector<MigrationDecision> evaluate_migrations(
    const std::vector<InteractionSample>& samples,
    const PlacementMap& placement, const std::set<LpId>& crashed,
    double threshold, std::uint64_t cap) {
    std::vector<const InteractionSample*> ordered;
    ordered.reserve(samples.size());
    for (const auto& s : samples) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const InteractionSample* a, const InteractionSample* b) {
                  return a->instance < b->instance;
              });

    PlacementMap work = placement;
    std::vector<std::uint64_t> load(work.num_lps(), 0);
    for (std::uint64_t e = 0; e < work.num_entities(); ++e)
        for (std::uint32_t j = 0; j < work.replicas(); ++j)
            ++load[work.lp_of({static_cast<EntityId>(e),
                               static_cast<std::uint16_t>(j)})];

    std::vector<MigrationDecision> decisions;
    for (const InteractionSample* s : ordered) {
        std::uint64_t total = 0;
        for (const auto& [lp, n] : s->sent_to) total += n;
        if (total == 0) continue;

        LpId dominant = kNoLp;
        std::uint64_t dominant_count = 0;
        for (const auto& [lp, n] : s->sent_to) {
            if (n > dominant_count) {
                dominant = lp;
                dominant_count = n;
            }
        }
        if (dominant == kNoLp) continue;
        if (static_cast<double>(dominant_count) <=
            threshold * static_cast<double>(total))
            continue;

        const LpId from = work.lp_of(s->instance);
        if (dominant == from || crashed.count(dominant) ||
            crashed.count(from))
            continue;
        if (work.entity_has_instance_on(s->instance.entity, dominant))
            continue;
        if (load[dominant] + 1 > cap) continue;

        work.set_lp(s->instance, dominant);
        --load[from];
        ++load[dominant];
        decisions.push_back(
            {s->instance, from, dominant, placement.epoch + 1});
    }
    return decisions;
}

} // namespace ftsim
