#ifndef PANGLOSS_CORE_MODEL_HPP
#define PANGLOSS_CORE_MODEL_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pangloss {

/// Signed distance between two offsets of the same page, in level units.
using Delta = std::int32_t;
/// Position inside a page, in level units (lines at L2, 8-byte words at L1).
using Offset = std::uint32_t;
using PageNumber = std::uint64_t;
using Address = std::uint64_t;

/// Fixed 4 KB pages. Every geometry derives its offset width from this.
inline constexpr std::uint32_t kPageBytes = 4096;

/**
 * Bit-level shape of one prefetcher instance (delta cache, page cache and
 * the address granularity it observes).
 */
struct LevelGeometry {
    std::string_view name;
    std::uint32_t offsets_per_page;
    std::uint32_t offset_bits;
    std::uint32_t delta_bits;
    std::uint32_t granularity_shift;
    std::uint32_t delta_sets;
    std::uint32_t delta_ways;
    std::uint32_t lfu_bits;
    std::uint32_t page_sets;
    std::uint32_t page_ways;
    std::uint32_t page_tag_bits;

    /// Most negative representable delta; marks "no previous delta".
    constexpr Delta sentinel() const { return -static_cast<Delta>(offsets_per_page); }
    constexpr Delta max_delta() const { return static_cast<Delta>(offsets_per_page) - 1; }
    constexpr std::uint32_t counter_max() const { return (1u << lfu_bits) - 1; }
    constexpr std::uint32_t page_index_bits() const
    {
        return static_cast<std::uint32_t>(std::countr_zero(page_sets));
    }

    /// True when every width is consistent with 4 KB pages.
    constexpr bool consistent() const
    {
        return std::has_single_bit(offsets_per_page) &&
               offsets_per_page == (1u << offset_bits) &&
               delta_bits == offset_bits + 1 &&
               delta_sets == (1u << delta_bits) &&
               (offsets_per_page << granularity_shift) == kPageBytes &&
               std::has_single_bit(page_sets) && delta_ways >= 1 &&
               page_ways >= 1 && lfu_bits >= 1 && lfu_bits < 32 &&
               page_tag_bits < 64;
    }

    constexpr bool operator==(const LevelGeometry&) const = default;
};

/// L2 prefetcher: 64-byte line granularity.
inline constexpr LevelGeometry kL2Geometry{
    .name = "l2",
    .offsets_per_page = 64,
    .offset_bits = 6,
    .delta_bits = 7,
    .granularity_shift = 6,
    .delta_sets = 128,
    .delta_ways = 16,
    .lfu_bits = 8,
    .page_sets = 256,
    .page_ways = 12,
    .page_tag_bits = 10,
};

/// L1D prefetcher: 8-byte word granularity.
inline constexpr LevelGeometry kL1Geometry{
    .name = "l1",
    .offsets_per_page = 512,
    .offset_bits = 9,
    .delta_bits = 10,
    .granularity_shift = 3,
    .delta_sets = 1024,
    .delta_ways = 16,
    .lfu_bits = 7,
    .page_sets = 256,
    .page_ways = 12,
    .page_tag_bits = 10,
};

static_assert(kL2Geometry.consistent());
static_assert(kL1Geometry.consistent());

inline const LevelGeometry& level_geometry(std::string_view level)
{
    if (level == "l2")
        return kL2Geometry;
    if (level == "l1")
        return kL1Geometry;
    throw std::invalid_argument("unknown level '" + std::string(level) + "'");
}

/// One demand access of a trace.
struct AccessRecord {
    Address address;

    constexpr bool operator==(const AccessRecord&) const = default;
};

struct PageLocation {
    PageNumber page;
    Offset offset;

    constexpr bool operator==(const PageLocation&) const = default;
};

/// Unaligned byte addresses are truncated to the level granularity.
constexpr PageLocation split_address(Address addr, const LevelGeometry& geo)
{
    const Address units = addr >> geo.granularity_shift;
    return {units >> geo.offset_bits,
            static_cast<Offset>(units & (geo.offsets_per_page - 1))};
}

/// Inverse of split_address in granularity units (addr >> granularity_shift).
constexpr Address join_units(PageLocation loc, const LevelGeometry& geo)
{
    return (loc.page << geo.offset_bits) | loc.offset;
}

constexpr Address to_byte_address(PageLocation loc, const LevelGeometry& geo)
{
    return join_units(loc, geo) << geo.granularity_shift;
}

constexpr bool in_page(std::int64_t offset, const LevelGeometry& geo)
{
    return offset >= 0 && offset < static_cast<std::int64_t>(geo.offsets_per_page);
}

/// A delta that two offsets of one page can produce (zero included).
constexpr bool is_observable_delta(Delta d, const LevelGeometry& geo)
{
    return d >= -geo.max_delta() && d <= geo.max_delta();
}

/// Anything the delta cache can index: observable deltas plus the sentinel.
constexpr bool is_representable_delta(Delta d, const LevelGeometry& geo)
{
    return d >= geo.sentinel() && d <= geo.max_delta();
}

} // namespace pangloss

#endif // PANGLOSS_CORE_MODEL_HPP
