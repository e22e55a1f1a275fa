#ifndef PANGLOSS_REFERENCE_PREFETCHERS_HPP
#define PANGLOSS_REFERENCE_PREFETCHERS_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pangloss/engine.hpp"

namespace pangloss {

enum class PrefetcherKind { pangloss, next_line, global_delta_markov, none };

inline std::string_view to_string(PrefetcherKind k)
{
    switch (k) {
    case PrefetcherKind::pangloss: return "pangloss";
    case PrefetcherKind::next_line: return "next-line";
    case PrefetcherKind::global_delta_markov: return "global-delta";
    case PrefetcherKind::none: return "none";
    }
    return "unknown";
}

inline PrefetcherKind parse_prefetcher_kind(std::string_view s)
{
    for (auto k : {PrefetcherKind::pangloss, PrefetcherKind::next_line,
                   PrefetcherKind::global_delta_markov, PrefetcherKind::none}) {
        if (s == to_string(k))
            return k;
    }
    throw std::invalid_argument("unknown prefetcher '" + std::string(s) + "'");
}

class NoPrefetcher final : public Prefetcher {
public:
    explicit NoPrefetcher(const LevelGeometry& geo) : geo_(geo) {}
    std::vector<PrefetchCandidate> on_access(Address) override { return {}; }
    const LevelGeometry& geometry() const override { return geo_; }

private:
    LevelGeometry geo_;
};

/// Offsets +1..+degree after the access, clipped to the page.
class NextLinePrefetcher final : public Prefetcher {
public:
    explicit NextLinePrefetcher(const LevelGeometry& geo, std::uint32_t degree = 1)
        : geo_(geo), degree_(degree)
    {
        if (degree < 1)
            throw std::invalid_argument("next-line: degree must be >= 1");
    }

    std::vector<PrefetchCandidate> on_access(Address addr) override
    {
        const auto loc = split_address(addr, geo_);
        std::vector<PrefetchCandidate> out;
        for (std::uint32_t k = 1; k <= degree_; ++k) {
            const std::int64_t target = std::int64_t{loc.offset} + k;
            if (!in_page(target, geo_))
                break;
            out.push_back({loc.page, static_cast<Offset>(target), k, 0});
        }
        return out;
    }

    const LevelGeometry& geometry() const override { return geo_; }

private:
    LevelGeometry geo_;
    std::uint32_t degree_;
};

/**
 * Pangloss without the page cache: the delta is taken against the single
 * most recent access. Pairs that straddle a page boundary are invalidated
 * and reset the chain state to the sentinel.
 */
class GlobalDeltaPrefetcher final : public Prefetcher {
public:
    explicit GlobalDeltaPrefetcher(const EngineConfig& cfg) : cfg_(cfg), delta_cache_(cfg.geo)
    {
        cfg_.validate();
    }

    std::vector<PrefetchCandidate> on_access(Address addr) override
    {
        const PageLocation loc = split_address(addr, cfg_.geo);
        const std::optional<PageLocation> prev = last_;
        last_ = loc;

        if (!prev || prev->page != loc.page) {
            if (prev)
                ++stats_.invalidated;
            last_delta_ = cfg_.geo.sentinel();
            return traverse(delta_cache_, last_delta_, loc, cfg_);
        }
        ++stats_.valid;
        const Delta delta = static_cast<Delta>(join_units(loc, cfg_.geo) - join_units(*prev, cfg_.geo));
        const Delta from = last_delta_;
        last_delta_ = delta;
        if (delta == 0)
            return {};
        delta_cache_.train(from, delta);
        return traverse(delta_cache_, delta, loc, cfg_);
    }

    const LevelGeometry& geometry() const override { return cfg_.geo; }
    TransitionStats transitions() const override { return stats_; }
    const DeltaCache& delta_cache() const { return delta_cache_; }

private:
    EngineConfig cfg_;
    DeltaCache delta_cache_;
    std::optional<PageLocation> last_;
    Delta last_delta_ = 0;
    TransitionStats stats_;
};

/// next-line uses cfg.degree as its lookahead.
inline std::unique_ptr<Prefetcher> make_prefetcher(PrefetcherKind kind, const EngineConfig& cfg)
{
    switch (kind) {
    case PrefetcherKind::pangloss: return std::make_unique<PanglossEngine>(cfg);
    case PrefetcherKind::next_line: return std::make_unique<NextLinePrefetcher>(cfg.geo, cfg.degree);
    case PrefetcherKind::global_delta_markov: return std::make_unique<GlobalDeltaPrefetcher>(cfg);
    case PrefetcherKind::none: return std::make_unique<NoPrefetcher>(cfg.geo);
    }
    throw std::invalid_argument("unknown prefetcher kind");
}

} // namespace pangloss

#endif // PANGLOSS_REFERENCE_PREFETCHERS_HPP
