#ifndef PANGLOSS_DELTA_CACHE_HPP
#define PANGLOSS_DELTA_CACHE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pangloss/core_model.hpp"

namespace pangloss {

struct DeltaCacheEntry {
    Delta next_delta = 0;
    std::uint32_t counter = 0;
    bool valid = false;
};

/// One outgoing arc of the approximated Markov chain.
struct Transition {
    Delta next_delta;
    std::uint32_t counter;
    /// Sum of all counters of the set at lookup time.
    std::uint64_t set_sum;
    std::uint32_t way;

    double probability() const
    {
        return static_cast<double>(counter) / static_cast<double>(set_sum);
    }
    /// Exact "probability > 1/3" test.
    bool exceeds_one_third() const { return 3ull * counter > set_sum; }
};

/**
 * Set-associative Markov-chain table. The set is selected by the current
 * delta; its ways hold the most frequent next deltas with LFU counters.
 * A saturated counter halves every counter of its set before incrementing,
 * so proportions survive while stale arcs decay.
 */
class DeltaCache {
public:
    explicit DeltaCache(const LevelGeometry& geo)
        : geo_(geo), entries_(static_cast<std::size_t>(geo.delta_sets) * geo.delta_ways)
    {
        if (!geo.consistent())
            throw std::invalid_argument("delta cache: inconsistent geometry");
    }

    const LevelGeometry& geometry() const { return geo_; }

    std::size_t set_index(Delta d) const
    {
        if (!is_representable_delta(d, geo_))
            throw std::out_of_range("delta cache: delta " + std::to_string(d) +
                                    " outside representable range");
        return static_cast<std::size_t>(d - geo_.sentinel());
    }

    std::span<const DeltaCacheEntry> set(Delta d) const
    {
        return {entries_.data() + set_index(d) * geo_.delta_ways, geo_.delta_ways};
    }

    /// Record one observed transition from_delta -> to_delta.
    void train(Delta from_delta, Delta to_delta)
    {
        if (to_delta == geo_.sentinel() || !is_representable_delta(to_delta, geo_))
            throw std::invalid_argument("delta cache: cannot train towards delta " +
                                        std::to_string(to_delta));
        auto ways = mutable_set(from_delta);

        auto hit = std::find_if(ways.begin(), ways.end(), [&](const DeltaCacheEntry& e) {
            return e.valid && e.next_delta == to_delta;
        });
        if (hit != ways.end()) {
            if (hit->counter == geo_.counter_max()) {
                halve(ways);
                ++halvings_;
            }
            ++hit->counter;
            hit->valid = true; // a 1-bit counter halves to zero
            return;
        }

        auto victim = std::find_if(ways.begin(), ways.end(),
                                   [](const DeltaCacheEntry& e) { return !e.valid; });
        if (victim == ways.end()) {
            // min_element keeps the first minimum: lowest way wins ties.
            victim = std::min_element(ways.begin(), ways.end(),
                                      [](const DeltaCacheEntry& a, const DeltaCacheEntry& b) {
                                          return a.counter < b.counter;
                                      });
        }
        *victim = {to_delta, 1, true};
    }

    /// Valid arcs of the set, most probable first; ties keep way order.
    std::vector<Transition> lookup(Delta current_delta) const
    {
        const auto ways = set(current_delta);
        const std::uint64_t sum = std::accumulate(
            ways.begin(), ways.end(), std::uint64_t{0},
            [](std::uint64_t acc, const DeltaCacheEntry& e) { return acc + (e.valid ? e.counter : 0); });

        std::vector<Transition> out;
        for (std::uint32_t w = 0; w < ways.size(); ++w) {
            if (ways[w].valid)
                out.push_back({ways[w].next_delta, ways[w].counter, sum, w});
        }
        std::stable_sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) {
            return a.counter > b.counter;
        });
        return out;
    }

    /// Number of overflow-triggered halving events since construction.
    std::uint64_t halvings() const { return halvings_; }

    void clear()
    {
        std::fill(entries_.begin(), entries_.end(), DeltaCacheEntry{});
        halvings_ = 0;
    }

    /// Columns: set_index,source_delta,next_delta,counter,probability.
    void write_csv(std::ostream& os) const
    {
        os << "set_index,source_delta,next_delta,counter,probability\n";
        for (std::uint32_t s = 0; s < geo_.delta_sets; ++s) {
            const Delta source = static_cast<Delta>(s) + geo_.sentinel();
            for (const auto& t : lookup(source)) {
                os << s << ',' << source << ',' << t.next_delta << ',' << t.counter << ','
                   << t.probability() << '\n';
            }
        }
    }

private:
    std::span<DeltaCacheEntry> mutable_set(Delta d)
    {
        return {entries_.data() + set_index(d) * geo_.delta_ways, geo_.delta_ways};
    }

    static void halve(std::span<DeltaCacheEntry> ways)
    {
        for (auto& e : ways) {
            if (!e.valid)
                continue;
            e.counter /= 2;
            if (e.counter == 0)
                e.valid = false;
        }
    }

    LevelGeometry geo_;
    std::vector<DeltaCacheEntry> entries_;
    std::uint64_t halvings_ = 0;
};

} // namespace pangloss

#endif // PANGLOSS_DELTA_CACHE_HPP
