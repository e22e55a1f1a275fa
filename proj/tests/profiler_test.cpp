#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "pangloss/profiler.hpp"
#include "pangloss/tracegen.hpp"

using namespace pangloss;

namespace {

std::set<std::pair<Delta, Delta>> cells_of(const AdjacencyMatrix& m)
{
    std::set<std::pair<Delta, Delta>> out;
    for (const auto& c : m.nonzero_cells())
        out.insert({c.from, c.to});
    return out;
}

std::string pgm_pixels(const AdjacencyMatrix& m)
{
    std::ostringstream os;
    write_pgm(os, m);
    const std::string s = os.str();
    const std::string header = "P5\n" + std::to_string(m.dimension()) + " " + std::to_string(m.dimension()) + "\n255\n";
    EXPECT_EQ(s.substr(0, header.size()), header);
    return s.substr(header.size());
}

} // namespace

TEST(Profiler, StrideTwoSinglePage)
{
    TraceSpec spec{pattern::Stride{2}, 20};
    const auto t = generate(spec);
    for (auto mode : {ProfileMode::global_consecutive, ProfileMode::per_page}) {
        const auto m = profile(t, kL2Geometry, mode);
        EXPECT_EQ(m.total(), 18u);
        EXPECT_EQ(m.count(2, 2), 18u);
        EXPECT_EQ(cells_of(m).size(), 1u);
    }
}

TEST(Profiler, InterleavedStreamsNeedPerPageReconstruction)
{
    TraceSpec a{pattern::Stride{1}, 1, 1000};
    TraceSpec b{pattern::Stride{2}, 1, 1000 + kStreamSpacing};
    TraceSpec spec{pattern::Interleaved{{a, b}}, 4000};
    const auto t = generate(spec);

    const auto global = profile(t, kL2Geometry, ProfileMode::global_consecutive);
    EXPECT_EQ(global.total(), 0u);

    // oracle: each de-interleaved stream profiled on its own
    a.length = b.length = 2000;
    const auto only_a = profile(generate(a), kL2Geometry, ProfileMode::global_consecutive);
    const auto only_b = profile(generate(b), kL2Geometry, ProfileMode::global_consecutive);
    const auto per_page = profile(t, kL2Geometry, ProfileMode::per_page);
    EXPECT_EQ(per_page.count(1, 1), only_a.count(1, 1));
    EXPECT_EQ(per_page.count(2, 2), only_b.count(2, 2));
    EXPECT_EQ(per_page.total(), only_a.total() + only_b.total());
    // 2000 accesses over 32 pages (stride 1) and 63 pages (stride 2)
    EXPECT_EQ(only_a.count(1, 1), 2000u - 2 * 32 + 2 - 2);
}

TEST(Profiler, SecondaryAccessEveryIteration)
{
    TraceSpec spec{pattern::SecondaryAccess{4, 1}, 4000};
    const auto m = profile(generate(spec), kL2Geometry, ProfileMode::per_page);
    EXPECT_EQ(cells_of(m), (std::set<std::pair<Delta, Delta>>{{1, 3}, {3, 1}}));
}

TEST(Profiler, OccasionalSecondaryAccessStructure)
{
    TraceSpec spec{pattern::SecondaryAccess{4, 1, 3}, 4000};
    for (auto mode : {ProfileMode::global_consecutive, ProfileMode::per_page}) {
        const auto m = profile(generate(spec), kL2Geometry, mode);
        // (d,d) stream, (d,d') into the extra access, (d',d-d') out of it, (d-d',d) back
        EXPECT_EQ(cells_of(m), (std::set<std::pair<Delta, Delta>>{{4, 4}, {4, 1}, {1, 3}, {3, 4}}));
    }
}

TEST(Profiler, JointRealizability)
{
    const auto& g = kL2Geometry;
    EXPECT_TRUE(jointly_realizable(63, -63, g));
    EXPECT_TRUE(jointly_realizable(32, 31, g));
    EXPECT_FALSE(jointly_realizable(32, 32, g));
    EXPECT_FALSE(jointly_realizable(-40, -30, g));
    EXPECT_TRUE(jointly_realizable(-40, 63, g));
    EXPECT_FALSE(jointly_realizable(-40, 64, g));

    // matches brute-force search over starting offsets
    for (Delta f = -63; f <= 63; ++f) {
        for (Delta t = -63; t <= 63; ++t) {
            bool exists = false;
            for (int o = 0; o < 64 && !exists; ++o)
                exists = in_page(o + f, g) && in_page(o + f + t, g);
            ASSERT_EQ(jointly_realizable(f, t, g), exists) << f << "," << t;
        }
    }
    AdjacencyMatrix m(g);
    EXPECT_THROW(m.add(40, 40), std::logic_error);
}

TEST(Profiler, PerPageDominatesGlobalAndCellsAreRealizable)
{
    const char* patterns[] = {"stride:5", "multi-delta:1,-3,7,20", "short-cycle:1,1,2,1,3", "secondary:4,1,2",
                              "random", "interleaved:stride:1|stride:-2|multi-delta:1,2,3",
                              "interleaved:secondary:8,3|short-cycle:2,5"};
    for (const auto* geo : {&kL2Geometry, &kL1Geometry}) {
        for (const char* p : patterns) {
            auto spec = parse_trace_spec(p, 20000, 3, PageNumber{1} << 20, 40);
            const auto t = generate(spec, *geo);
            const auto g = profile(t, *geo, ProfileMode::global_consecutive);
            const auto pp = profile(t, *geo, ProfileMode::per_page);
            EXPECT_GE(pp.total(), g.total()) << p;
            for (const auto* m : {&g, &pp})
                for (const auto& c : m->nonzero_cells())
                    ASSERT_TRUE(jointly_realizable(c.from, c.to, *geo)) << p;
        }
    }
}

TEST(Profiler, RowProbabilitiesSumToOne)
{
    auto spec = parse_trace_spec("multi-delta:1,-3,7,20,2", 50000, 8);
    const auto m = profile(generate(spec), kL2Geometry, ProfileMode::per_page);
    std::map<Delta, double> rows;
    for (const auto& c : m.nonzero_cells())
        rows[c.from] += c.probability;
    ASSERT_FALSE(rows.empty());
    for (const auto& [from, sum] : rows)
        EXPECT_NEAR(sum, 1.0, 1e-9) << from;

    // the exported text keeps enough digits for the same check
    std::ostringstream os;
    write_cells_csv(os, m);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    std::map<Delta, double> parsed;
    while (std::getline(is, line)) {
        int f, t;
        unsigned long long c;
        double p;
        ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,%llu,%lf", &f, &t, &c, &p), 4);
        parsed[f] += p;
    }
    for (const auto& [from, sum] : parsed)
        EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Profiler, EmptyMatrixExports)
{
    AdjacencyMatrix m(kL2Geometry);
    const auto px = pgm_pixels(m);
    EXPECT_EQ(px.size(), 127u * 127u);
    EXPECT_EQ(px, std::string(px.size(), '\0'));
    std::ostringstream csv, edges;
    write_cells_csv(csv, m);
    write_edge_list(edges, m);
    EXPECT_EQ(csv.str(), "from,to,count,probability\n");
    EXPECT_EQ(edges.str(), "");
}

TEST(Profiler, SingleCellIsOneWhitePixel)
{
    AdjacencyMatrix m(kL2Geometry);
    m.add(-5, 12, 7);
    const auto px = pgm_pixels(m);
    const std::size_t x = -5 + 63, y = 12 + 63;
    for (std::size_t i = 0; i < px.size(); ++i)
        ASSERT_EQ(static_cast<unsigned char>(px[i]), i == y * 127 + x ? 255 : 0) << i;
}

TEST(Profiler, LogScaledIntensity)
{
    AdjacencyMatrix m(kL2Geometry);
    m.add(1, 1, 1000);
    m.add(2, 2, 10);
    m.add(3, 3, 1);
    const auto px = pgm_pixels(m);
    auto at = [&](Delta f, Delta t) { return static_cast<unsigned char>(px[(t + 63) * 127 + (f + 63)]); };
    EXPECT_EQ(at(1, 1), 255);
    EXPECT_EQ(at(2, 2), static_cast<int>(std::floor(255.0 * std::log(11.0) / std::log(1001.0))));
    EXPECT_EQ(at(3, 3), static_cast<int>(std::floor(255.0 * std::log(2.0) / std::log(1001.0))));
}

TEST(Profiler, EdgeListSortedByProbability)
{
    AdjacencyMatrix m(kL2Geometry);
    m.add(1, 2, 1);
    m.add(1, 3, 3);
    m.add(4, 4, 5);
    std::ostringstream os;
    write_edge_list(os, m);
    EXPECT_EQ(os.str(), "4 4 5 1\n1 3 3 0.75\n1 2 1 0.25\n");
}

TEST(Profiler, ExportWritesThreeFiles)
{
    const auto dir = std::filesystem::temp_directory_path() / "pangloss_profiler_test";
    std::filesystem::create_directories(dir);
    AdjacencyMatrix m(kL2Geometry);
    m.add(2, 2, 3);
    const auto paths = export_matrix(m, (dir / "out").string());
    for (const auto& p : {paths.csv, paths.pgm, paths.edges})
        EXPECT_TRUE(std::filesystem::exists(p)) << p;
    EXPECT_THROW(export_matrix(m, (dir / "missing" / "out").string()), std::runtime_error);
    std::filesystem::remove_all(dir);
}
