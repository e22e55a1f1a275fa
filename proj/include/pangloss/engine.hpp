#ifndef PANGLOSS_ENGINE_HPP
#define PANGLOSS_ENGINE_HPP

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pangloss/core_model.hpp"
#include "pangloss/delta_cache.hpp"
#include "pangloss/page_cache.hpp"
#include "pangloss/prefetcher.hpp"

namespace pangloss {

/// Traversal threshold is fixed: a child is followed iff probability > 1/3.
struct EngineConfig {
    LevelGeometry geo = kL2Geometry;
    std::uint32_t degree = 4;
    std::uint32_t max_steps = 8;
    bool dedupe = true;

    static EngineConfig for_level(const LevelGeometry& geo, std::uint32_t degree = 4)
    {
        return {geo, degree, 2 * degree, true};
    }

    void validate() const
    {
        if (degree < 1)
            throw std::invalid_argument("engine: degree must be >= 1");
        if (max_steps < degree)
            throw std::invalid_argument("engine: max_steps must be >= degree");
    }
};

/**
 * Walk the chain from start_delta. At each step every child above 1/3
 * yields a candidate at base + child (dropped when it leaves the page),
 * then the walk continues from the most probable such child with the
 * base moved by its delta, in page or not. Stops after `degree` emitted
 * candidates, when no child clears the threshold, or after max_steps.
 */
inline std::vector<PrefetchCandidate> traverse(const DeltaCache& cache, Delta start_delta,
                                               PageLocation trigger, const EngineConfig& cfg)
{
    std::vector<PrefetchCandidate> out;
    std::vector<std::int64_t> seen;
    if (cfg.dedupe)
        seen.push_back(trigger.offset);

    Delta current = start_delta;
    std::int64_t base = trigger.offset;
    for (std::uint32_t step = 0; step < cfg.max_steps; ++step) {
        const auto children = cache.lookup(current);
        std::uint32_t above = 0;
        std::uint32_t rank = 0;
        for (const auto& child : children) {
            if (!child.exceeds_one_third())
                break; // sorted by counter
            ++above;
            const std::int64_t target = base + child.next_delta;
            if (!in_page(target, cfg.geo))
                continue;
            if (cfg.dedupe) {
                if (std::find(seen.begin(), seen.end(), target) != seen.end())
                    continue;
                seen.push_back(target);
            }
            out.push_back({trigger.page, static_cast<Offset>(target), step + 1, rank++});
            if (out.size() == cfg.degree)
                return out;
        }
        assert(above <= 2);
        if (above == 0)
            break;
        current = children.front().next_delta;
        base += current;
    }
    return out;
}

/// Per-access pipeline: page cache -> delta cache training -> traversal.
class PanglossEngine final : public Prefetcher {
public:
    explicit PanglossEngine(const EngineConfig& cfg)
        : cfg_(cfg), delta_cache_(cfg.geo), page_cache_(cfg.geo)
    {
        cfg_.validate();
    }

    std::vector<PrefetchCandidate> on_access(Address addr) override
    {
        const PageLocation loc = split_address(addr, cfg_.geo);
        const PageLookupResult r = page_cache_.access(loc.page, loc.offset);
        if (!r.hit) {
            ++stats_.invalidated;
            return traverse(delta_cache_, cfg_.geo.sentinel(), loc, cfg_);
        }
        ++stats_.valid;
        if (r.zero_delta())
            return {};
        assert(r.current_delta != cfg_.geo.sentinel());
        delta_cache_.train(r.prev_delta, r.current_delta);
        return traverse(delta_cache_, r.current_delta, loc, cfg_);
    }

    const LevelGeometry& geometry() const override { return cfg_.geo; }
    TransitionStats transitions() const override { return stats_; }

    const EngineConfig& config() const { return cfg_; }
    const DeltaCache& delta_cache() const { return delta_cache_; }
    const PageCache& page_cache() const { return page_cache_; }

private:
    EngineConfig cfg_;
    DeltaCache delta_cache_;
    PageCache page_cache_;
    TransitionStats stats_;
};

} // namespace pangloss

#endif // PANGLOSS_ENGINE_HPP
