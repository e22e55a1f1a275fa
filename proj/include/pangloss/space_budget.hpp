#ifndef PANGLOSS_SPACE_BUDGET_HPP
#define PANGLOSS_SPACE_BUDGET_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pangloss/core_model.hpp"

namespace pangloss {

/// Storage of one table: sets x ways x (sum of per-entry field widths).
struct StructureBudget {
    std::string level;
    std::string structure;
    std::uint64_t sets;
    std::uint64_t ways;
    std::vector<std::uint32_t> field_bits;

    std::uint64_t entry_bits() const
    {
        return std::accumulate(field_bits.begin(), field_bits.end(), std::uint64_t{0});
    }
    std::uint64_t bits() const { return sets * ways * entry_bits(); }
};

/// Decimal kilobytes (1 KB = 1000 bytes), rounded to one decimal.
inline double bits_to_kb(std::uint64_t bits)
{
    return std::round(static_cast<double>(bits) / 8000.0 * 10.0) / 10.0;
}

inline std::string format_kb(std::uint64_t bits)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", bits_to_kb(bits));
    return buf;
}

struct SpaceBudget {
    std::vector<StructureBudget> rows;

    std::uint64_t level_bits(const std::string& level) const
    {
        std::uint64_t b = 0;
        for (const auto& r : rows)
            if (r.level == level)
                b += r.bits();
        return b;
    }
    std::uint64_t total_bits() const
    {
        std::uint64_t b = 0;
        for (const auto& r : rows)
            b += r.bits();
        return b;
    }
};

inline std::vector<StructureBudget> structures_of(const LevelGeometry& geo)
{
    const std::string level(geo.name);
    return {
        {level, "Delta cache", geo.delta_sets, geo.delta_ways, {geo.delta_bits, geo.lfu_bits}},
        // tag, previous delta, previous offset, NRU bit
        {level, "Page cache", geo.page_sets, geo.page_ways,
         {geo.page_tag_bits, geo.delta_bits, geo.offset_bits, 1}},
    };
}

inline SpaceBudget space_budget(std::span<const LevelGeometry> levels)
{
    SpaceBudget b;
    for (const auto& geo : levels)
        for (auto& s : structures_of(geo))
            b.rows.push_back(std::move(s));
    return b;
}

/// Single-core budget table for the L1D + L2 configuration.
inline void write_space_table(std::ostream& os)
{
    const LevelGeometry levels[] = {kL1Geometry, kL2Geometry};
    const auto budget = space_budget(levels);
    auto describe = [](const StructureBudget& r) {
        std::string s = std::to_string(r.sets) + " sets x " + std::to_string(r.ways) + " ways x (";
        for (std::size_t i = 0; i < r.field_bits.size(); ++i)
            s += (i ? " + " : "") + std::to_string(r.field_bits[i]);
        return s + ")";
    };
    char line[160];
    std::string current;
    for (const auto& r : budget.rows) {
        if (r.level != current) {
            current = r.level;
            os << (current == "l1" ? "L1D:" : "L2:") << '\n';
        }
        std::snprintf(line, sizeof line, "  %-12s %-40s %6s KB\n", r.structure.c_str(),
                      describe(r).c_str(), format_kb(r.bits()).c_str());
        os << line;
    }
    std::snprintf(line, sizeof line, "LLC:           %-40s %6s KB\n", "None", "0.0");
    os << line;
    std::snprintf(line, sizeof line, "Total %-48s %6s KB\n", "", format_kb(budget.total_bits()).c_str());
    os << line;
    std::snprintf(line, sizeof line, "L2 only %-46s %6s KB\n", "", format_kb(budget.level_bits("l2")).c_str());
    os << line;
}

} // namespace pangloss

#endif // PANGLOSS_SPACE_BUDGET_HPP
