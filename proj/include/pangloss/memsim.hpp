#ifndef PANGLOSS_MEMSIM_HPP
#define PANGLOSS_MEMSIM_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pangloss/core_model.hpp"
#include "pangloss/prefetcher.hpp"

namespace pangloss {

struct CacheConfig {
    std::uint64_t size_bytes = 512 * 1024;
    std::uint32_t line_size = 64;
    std::uint32_t ways = 8;

    std::uint64_t sets() const { return size_bytes / (std::uint64_t{line_size} * ways); }

    void validate() const
    {
        if (line_size == 0 || !std::has_single_bit(line_size))
            throw std::invalid_argument("cache: line size must be a power of two");
        if (ways == 0 || size_bytes % (std::uint64_t{line_size} * ways) != 0)
            throw std::invalid_argument("cache: size must be a multiple of line_size * ways");
        if (!std::has_single_bit(sets()))
            throw std::invalid_argument("cache: set count must be a power of two");
    }
};

struct SimMetrics {
    std::uint64_t demand_accesses = 0;
    std::uint64_t demand_hits = 0;
    std::uint64_t demand_misses = 0;
    std::uint64_t prefetches_issued = 0;
    std::uint64_t prefetches_useful = 0;
    std::uint64_t prefetches_unused_evicted = 0;
    /// Demand hits on a prefetched, not yet demand-touched line.
    std::uint64_t prefetch_hits = 0;
    std::uint64_t valid_transitions = 0;
    std::uint64_t invalidated_transitions = 0;

    double accuracy() const
    {
        return prefetches_issued == 0 ? 0.0
                                      : static_cast<double>(prefetches_useful) / prefetches_issued;
    }
    double coverage() const
    {
        const auto denom = prefetch_hits + demand_misses;
        return denom == 0 ? 0.0 : static_cast<double>(prefetch_hits) / denom;
    }
    double valid_transition_fraction() const
    {
        const auto denom = valid_transitions + invalidated_transitions;
        return denom == 0 ? 0.0 : static_cast<double>(valid_transitions) / denom;
    }

    bool operator==(const SimMetrics&) const = default;
};

/// Set-associative LRU cache that remembers which lines a prefetch filled.
class LruCache {
public:
    struct Line {
        std::uint64_t line_addr = 0;
        std::uint64_t stamp = 0;
        bool valid = false;
        bool prefetched = false;
        /// Prefetch issued inside the measured window.
        bool counted = false;
    };

    explicit LruCache(const CacheConfig& cfg)
        : cfg_(cfg), line_shift_(static_cast<std::uint32_t>(std::countr_zero(cfg.line_size)))
    {
        cfg_.validate();
        lines_.resize(cfg_.sets() * cfg_.ways);
    }

    std::uint64_t line_of(Address addr) const { return addr >> line_shift_; }

    /// Resident line for addr, or nullptr. Touches LRU state when found.
    Line* probe(std::uint64_t line_addr)
    {
        auto ways = set_of(line_addr);
        for (auto& l : ways) {
            if (l.valid && l.line_addr == line_addr) {
                l.stamp = ++clock_;
                return &l;
            }
        }
        return nullptr;
    }

    bool contains(std::uint64_t line_addr) const
    {
        const auto s = line_addr & (cfg_.sets() - 1);
        const auto* base = lines_.data() + s * cfg_.ways;
        return std::any_of(base, base + cfg_.ways,
                           [&](const Line& l) { return l.valid && l.line_addr == line_addr; });
    }

    /// Insert as most recent; returns the evicted line (valid == false if none).
    Line fill(std::uint64_t line_addr, bool prefetched, bool counted)
    {
        auto ways = set_of(line_addr);
        auto victim = std::find_if(ways.begin(), ways.end(), [](const Line& l) { return !l.valid; });
        if (victim == ways.end()) {
            victim = std::min_element(ways.begin(), ways.end(),
                                      [](const Line& a, const Line& b) { return a.stamp < b.stamp; });
        }
        const Line old = *victim;
        *victim = {line_addr, ++clock_, true, prefetched, counted};
        return old;
    }

private:
    std::span<Line> set_of(std::uint64_t line_addr)
    {
        const auto s = line_addr & (cfg_.sets() - 1);
        return {lines_.data() + s * cfg_.ways, cfg_.ways};
    }

    CacheConfig cfg_;
    std::uint32_t line_shift_;
    std::vector<Line> lines_;
    std::uint64_t clock_ = 0;
};

struct SimOptions {
    /// Leading accesses that train state but are excluded from the metrics.
    std::size_t warmup = 0;
};

/**
 * Replay a trace through one cache level. Prefetches fill instantly as the
 * most recent line; candidates already resident are dropped.
 */
inline SimMetrics run_simulation(std::span<const AccessRecord> trace, Prefetcher& prefetcher,
                                 const CacheConfig& cache_cfg, const SimOptions& opts = {})
{
    if (trace.empty())
        throw std::invalid_argument("simulation: empty trace");

    LruCache cache(cache_cfg);
    SimMetrics m;
    TransitionStats base_stats = prefetcher.transitions();
    const LevelGeometry& geo = prefetcher.geometry();

    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i == opts.warmup && i != 0) {
            m = {};
            base_stats = prefetcher.transitions();
        }
        const bool measured = i >= opts.warmup;
        const std::uint64_t line = cache.line_of(trace[i].address);

        ++m.demand_accesses;
        if (auto* hit = cache.probe(line)) {
            ++m.demand_hits;
            if (hit->prefetched) {
                ++m.prefetch_hits;
                if (hit->counted)
                    ++m.prefetches_useful;
                hit->prefetched = false;
                hit->counted = false;
            }
        } else {
            ++m.demand_misses;
            const auto evicted = cache.fill(line, false, false);
            if (evicted.valid && evicted.prefetched && evicted.counted)
                ++m.prefetches_unused_evicted;
        }

        for (const auto& c : prefetcher.on_access(trace[i].address)) {
            const std::uint64_t target = cache.line_of(to_byte_address(c.location(), geo));
            if (cache.contains(target))
                continue;
            ++m.prefetches_issued;
            const auto evicted = cache.fill(target, true, measured);
            if (evicted.valid && evicted.prefetched && evicted.counted)
                ++m.prefetches_unused_evicted;
        }
    }

    const TransitionStats end_stats = prefetcher.transitions();
    m.valid_transitions = end_stats.valid - base_stats.valid;
    m.invalidated_transitions = end_stats.invalidated - base_stats.invalidated;
    return m;
}

} // namespace pangloss

#endif // PANGLOSS_MEMSIM_HPP
