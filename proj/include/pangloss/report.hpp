#ifndef PANGLOSS_REPORT_HPP
#define PANGLOSS_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "pangloss/core_model.hpp"
#include "pangloss/memsim.hpp"
#include "pangloss/reference_prefetchers.hpp"

namespace pangloss {

inline constexpr int kMetricsSchemaVersion = 1;

/// 64-bit FNV-1a.
class Fnv1a {
public:
    void update(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ull;
        }
    }
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t trace_hash(std::span<const AccessRecord> trace)
{
    Fnv1a h;
    for (const auto& r : trace) {
        unsigned char b[8];
        for (int k = 0; k < 8; ++k)
            b[k] = static_cast<unsigned char>(r.address >> (8 * k));
        h.update(b, 8);
    }
    return h.value();
}

/// Everything that determines a simulation besides the trace itself.
struct RunConfig {
    PrefetcherKind prefetcher = PrefetcherKind::pangloss;
    LevelGeometry geo = kL2Geometry;
    std::uint32_t degree = 4;
    std::uint32_t max_steps = 8;
    CacheConfig cache;
    std::size_t warmup = 0;

    std::string canonical() const
    {
        return "prefetcher=" + std::string(to_string(prefetcher)) + ";level=" + std::string(geo.name) +
               ";degree=" + std::to_string(degree) + ";max_steps=" + std::to_string(max_steps) +
               ";cache_bytes=" + std::to_string(cache.size_bytes) + ";line=" +
               std::to_string(cache.line_size) + ";ways=" + std::to_string(cache.ways) +
               ";warmup=" + std::to_string(warmup);
    }
    std::uint64_t hash() const
    {
        Fnv1a h;
        h.update(canonical());
        return h.value();
    }
    EngineConfig engine() const { return {geo, degree, max_steps, true}; }
};

inline SimMetrics run_configured(std::span<const AccessRecord> trace, const RunConfig& cfg)
{
    auto pf = make_prefetcher(cfg.prefetcher, cfg.engine());
    return run_simulation(trace, *pf, cfg.cache, {cfg.warmup});
}

inline nlohmann::ordered_json metrics_json(const SimMetrics& m)
{
    return {
        {"demand_accesses", m.demand_accesses},
        {"demand_hits", m.demand_hits},
        {"demand_misses", m.demand_misses},
        {"prefetches_issued", m.prefetches_issued},
        {"prefetches_useful", m.prefetches_useful},
        {"prefetches_unused_evicted", m.prefetches_unused_evicted},
        {"prefetch_hits", m.prefetch_hits},
        {"valid_transitions", m.valid_transitions},
        {"invalidated_transitions", m.invalidated_transitions},
        {"accuracy", m.accuracy()},
        {"coverage", m.coverage()},
        {"valid_transition_fraction", m.valid_transition_fraction()},
    };
}

inline nlohmann::ordered_json run_report(const RunConfig& cfg, const SimMetrics& m,
                                         std::span<const AccessRecord> trace, const std::string& trace_path)
{
    nlohmann::ordered_json j;
    j["schema_version"] = kMetricsSchemaVersion;
    j["config"] = {
        {"config_hash", hex64(cfg.hash())},
        {"prefetcher", to_string(cfg.prefetcher)},
        {"level", cfg.geo.name},
        {"degree", cfg.degree},
        {"max_steps", cfg.max_steps},
        {"cache_bytes", cfg.cache.size_bytes},
        {"line_size", cfg.cache.line_size},
        {"ways", cfg.cache.ways},
        {"warmup", cfg.warmup},
    };
    j["trace"] = {{"path", trace_path}, {"records", trace.size()}, {"hash", hex64(trace_hash(trace))}};
    j["metrics"] = metrics_json(m);
    return j;
}

inline void write_metrics_csv(std::ostream& os, const RunConfig& cfg, const SimMetrics& m, bool header = true)
{
    const auto mj = metrics_json(m);
    if (header) {
        os << "config_hash,prefetcher,level,degree,cache_bytes,ways,warmup";
        for (const auto& [k, v] : mj.items())
            os << ',' << k;
        os << '\n';
    }
    os << hex64(cfg.hash()) << ',' << to_string(cfg.prefetcher) << ',' << cfg.geo.name << ','
       << cfg.degree << ',' << cfg.cache.size_bytes << ',' << cfg.cache.ways << ',' << cfg.warmup;
    for (const auto& [k, v] : mj.items())
        os << ',' << v.dump();
    os << '\n';
}

} // namespace pangloss

#endif // PANGLOSS_REPORT_HPP
