#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pangloss/memsim.hpp"
#include "pangloss/reference_prefetchers.hpp"

using namespace pangloss;

namespace {

std::vector<AccessRecord> sequential_lines(std::uint64_t first_line, std::size_t n, std::int64_t step = 1)
{
    std::vector<AccessRecord> t;
    for (std::size_t i = 0; i < n; ++i)
        t.push_back({(first_line + static_cast<std::uint64_t>(static_cast<std::int64_t>(i) * step)) * 64});
    return t;
}

void check_invariants(const SimMetrics& m)
{
    EXPECT_EQ(m.demand_hits + m.demand_misses, m.demand_accesses);
    EXPECT_LE(m.prefetches_useful, m.prefetches_issued);
    EXPECT_LE(m.prefetches_useful, m.prefetch_hits);
}

} // namespace

TEST(CacheConfig, Validation)
{
    CacheConfig ok;
    EXPECT_EQ(ok.sets(), 1024u);
    EXPECT_NO_THROW(ok.validate());
    EXPECT_THROW((CacheConfig{3 * 64 * 8, 64, 8}).validate(), std::invalid_argument);
    EXPECT_THROW((CacheConfig{512 * 1024, 48, 8}).validate(), std::invalid_argument);
    EXPECT_THROW((CacheConfig{1000, 64, 8}).validate(), std::invalid_argument);
}

TEST(Memsim, NextLineOnSequentialStreamLosesOneLinePerPage)
{
    const auto trace = sequential_lines(64 * 5000, 64 * 100);
    NextLinePrefetcher pf(kL2Geometry, 1);
    const auto m = run_simulation(trace, pf, {});
    check_invariants(m);
    EXPECT_EQ(m.demand_misses, 100u);
    EXPECT_EQ(m.prefetch_hits, 6300u);
    EXPECT_EQ(m.prefetches_issued, 6300u);
    EXPECT_DOUBLE_EQ(m.accuracy(), 1.0);
    EXPECT_DOUBLE_EQ(m.coverage(), 63.0 / 64.0);
}

TEST(Memsim, NoPrefetcherIssuesNothing)
{
    const auto trace = sequential_lines(12345, 5000, 3);
    NoPrefetcher pf(kL2Geometry);
    const auto m = run_simulation(trace, pf, {});
    check_invariants(m);
    EXPECT_EQ(m.prefetches_issued, 0u);
    EXPECT_EQ(m.coverage(), 0.0);
    EXPECT_EQ(m.accuracy(), 0.0);
}

TEST(Memsim, DemandBehaviourMatchesReferenceLru)
{
    std::mt19937_64 rng(2024);
    for (const CacheConfig cfg : {CacheConfig{}, CacheConfig{16 * 1024, 64, 4}, CacheConfig{4096, 64, 1}}) {
        std::vector<AccessRecord> trace;
        for (int i = 0; i < 100000; ++i) {
            // hot set plus cold tail so both hits and misses occur
            const std::uint64_t line = rng() % 4 == 0 ? rng() % 1'000'000 : rng() % (cfg.sets() * cfg.ways * 2);
            trace.push_back({line * 64 + rng() % 64});
        }
        NoPrefetcher pf(kL2Geometry);
        const auto m = run_simulation(trace, pf, cfg);
        oracle::ReferenceLru ref(cfg.sets(), cfg.ways);
        std::uint64_t hits = 0;
        for (const auto& r : trace)
            hits += ref.access(r.address / 64);
        EXPECT_EQ(m.demand_hits, hits);
        EXPECT_EQ(m.demand_misses, trace.size() - hits);
    }
}

TEST(Memsim, UnusedPrefetchesAreCountedOnEviction)
{
    // stride of 8 lines: next-line +1..+4 is never touched
    const auto trace = sequential_lines(1 << 20, 20000, 8);
    NextLinePrefetcher pf(kL2Geometry, 4);
    const auto m = run_simulation(trace, pf, {64 * 1024, 64, 4});
    check_invariants(m);
    EXPECT_EQ(m.prefetches_useful, 0u);
    EXPECT_GT(m.prefetches_unused_evicted, m.prefetches_issued / 2);
}

TEST(Memsim, WarmupExcludedFromMetrics)
{
    const auto trace = sequential_lines(64 * 5000, 64 * 100);
    NextLinePrefetcher pf(kL2Geometry, 1);
    const auto m = run_simulation(trace, pf, {}, {640});
    check_invariants(m);
    EXPECT_EQ(m.demand_accesses, trace.size() - 640);
    EXPECT_EQ(m.demand_misses, 90u);
    EXPECT_EQ(m.prefetch_hits, 63u * 90u);
    EXPECT_EQ(m.prefetches_issued, 63u * 90u);
    EXPECT_EQ(m.prefetches_useful, 63u * 90u);
}

TEST(Memsim, RandomTraceHasChanceLevelAccuracy)
{
    std::mt19937_64 rng(77);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        rng.seed(seed);
        std::vector<AccessRecord> trace;
        for (int i = 0; i < 200000; ++i)
            trace.push_back({to_byte_address({(1 << 20) + rng() % 100000, static_cast<Offset>(rng() % 64)},
                                              kL2Geometry)});
        PanglossEngine pf(EngineConfig::for_level(kL2Geometry));
        const auto m = run_simulation(trace, pf, {});
        check_invariants(m);
        // 100k pages x 64 lines: a random prefetch is reused with probability ~1e-3
        EXPECT_LT(m.accuracy(), 0.01);
        EXPECT_LT(m.prefetches_issued, trace.size() / 10);
    }
}

TEST(Memsim, DeterministicReplay)
{
    std::mt19937_64 rng(5);
    std::vector<AccessRecord> trace;
    for (int i = 0; i < 50000; ++i)
        trace.push_back({(1ull << 26) + (rng() % 20000) * 64});
    const auto cfg = EngineConfig::for_level(kL2Geometry);
    PanglossEngine a(cfg), b(cfg);
    EXPECT_EQ(run_simulation(trace, a, {}), run_simulation(trace, b, {}));
}

TEST(Memsim, StridePanglossIsAccurate)
{
    const auto trace = sequential_lines(64 * 7000, 20000, 2);
    PanglossEngine pf(EngineConfig::for_level(kL2Geometry));
    const auto m = run_simulation(trace, pf, {}, {1000});
    check_invariants(m);
    EXPECT_GT(m.accuracy(), 0.99);
    EXPECT_GT(m.coverage(), 0.95);
    EXPECT_GT(m.valid_transition_fraction(), 0.95);
}

TEST(Memsim, EmptyTraceRejected)
{
    NoPrefetcher pf(kL2Geometry);
    EXPECT_THROW(run_simulation({}, pf, {}), std::invalid_argument);
}
