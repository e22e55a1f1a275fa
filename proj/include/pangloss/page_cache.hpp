#ifndef PANGLOSS_PAGE_CACHE_HPP
#define PANGLOSS_PAGE_CACHE_HPP

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "pangloss/core_model.hpp"

namespace pangloss {

struct PageCacheEntry {
    std::uint32_t tag = 0;
    Delta delta_prev = 0;
    Offset offset_prev = 0;
    bool nru = false; // true: recently used
    bool valid = false;
};

struct PageLookupResult {
    bool hit = false;
    /// Stored values before this access updated the entry (hits only).
    Delta prev_delta = 0;
    Offset prev_offset = 0;
    /// offset - prev_offset (hits only).
    Delta current_delta = 0;

    bool zero_delta() const { return hit && current_delta == 0; }
};

/**
 * 1-bit NRU victim choice on a full set. When every bit is set, all bits
 * except the most recently touched way are cleared first.
 */
inline std::size_t nru_victim(std::span<PageCacheEntry> set, std::size_t last_touched)
{
    auto is_cold = [](const PageCacheEntry& e) { return !e.nru; };
    auto it = std::find_if(set.begin(), set.end(), is_cold);
    if (it == set.end()) {
        for (std::size_t w = 0; w < set.size(); ++w) {
            if (w != last_touched)
                set[w].nru = false;
        }
        it = std::find_if(set.begin(), set.end(), is_cold);
        if (it == set.end())
            return last_touched; // single-way set
    }
    return static_cast<std::size_t>(it - set.begin());
}

/// Last offset and last delta per page, indexed by the low page-number bits.
class PageCache {
public:
    explicit PageCache(const LevelGeometry& geo)
        : geo_(geo),
          entries_(static_cast<std::size_t>(geo.page_sets) * geo.page_ways),
          last_touched_(geo.page_sets, 0)
    {
        if (!geo.consistent())
            throw std::invalid_argument("page cache: inconsistent geometry");
    }

    const LevelGeometry& geometry() const { return geo_; }

    std::size_t set_index(PageNumber page) const
    {
        return static_cast<std::size_t>(page & (geo_.page_sets - 1));
    }

    /// Page-number bits directly above the index bits.
    std::uint32_t tag(PageNumber page) const
    {
        const PageNumber mask = (PageNumber{1} << geo_.page_tag_bits) - 1;
        return static_cast<std::uint32_t>((page >> geo_.page_index_bits()) & mask);
    }

    PageLookupResult access(PageNumber page, Offset offset)
    {
        if (offset >= geo_.offsets_per_page)
            throw std::out_of_range("page cache: offset outside page");
        const std::size_t s = set_index(page);
        const std::uint32_t t = tag(page);
        auto ways = mutable_set(s);

        for (std::size_t w = 0; w < ways.size(); ++w) {
            auto& e = ways[w];
            if (!e.valid || e.tag != t)
                continue;
            PageLookupResult r{true, e.delta_prev, e.offset_prev,
                               static_cast<Delta>(offset) - static_cast<Delta>(e.offset_prev)};
            e.delta_prev = r.current_delta;
            e.offset_prev = offset;
            e.nru = true;
            last_touched_[s] = w;
            return r;
        }

        auto free_way = std::find_if(ways.begin(), ways.end(),
                                     [](const PageCacheEntry& e) { return !e.valid; });
        const std::size_t w = free_way != ways.end()
                                  ? static_cast<std::size_t>(free_way - ways.begin())
                                  : nru_victim(ways, last_touched_[s]);
        ways[w] = {t, geo_.sentinel(), offset, true, true};
        last_touched_[s] = w;
        return {};
    }

    std::span<const PageCacheEntry> set(std::size_t index) const
    {
        return {entries_.data() + index * geo_.page_ways, geo_.page_ways};
    }

    void clear()
    {
        std::fill(entries_.begin(), entries_.end(), PageCacheEntry{});
        std::fill(last_touched_.begin(), last_touched_.end(), 0);
    }

    /// Columns: set,way,tag,delta_prev,offset_prev,nru (valid entries only).
    void write_csv(std::ostream& os) const
    {
        os << "set,way,tag,delta_prev,offset_prev,nru\n";
        for (std::size_t s = 0; s < geo_.page_sets; ++s) {
            const auto ways = set(s);
            for (std::size_t w = 0; w < ways.size(); ++w) {
                const auto& e = ways[w];
                if (e.valid)
                    os << s << ',' << w << ',' << e.tag << ',' << e.delta_prev << ','
                       << e.offset_prev << ',' << (e.nru ? 1 : 0) << '\n';
            }
        }
    }

private:
    std::span<PageCacheEntry> mutable_set(std::size_t index)
    {
        return {entries_.data() + index * geo_.page_ways, geo_.page_ways};
    }

    LevelGeometry geo_;
    std::vector<PageCacheEntry> entries_;
    std::vector<std::size_t> last_touched_;
};

} // namespace pangloss

#endif // PANGLOSS_PAGE_CACHE_HPP
