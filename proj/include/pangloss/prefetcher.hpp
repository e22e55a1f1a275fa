#ifndef PANGLOSS_PREFETCHER_HPP
#define PANGLOSS_PREFETCHER_HPP

#include <cstdint>
#include <vector>

#include "pangloss/core_model.hpp"

namespace pangloss {

struct PrefetchCandidate {
    PageNumber page;
    Offset offset;
    /// Traversal step that produced the candidate, starting at 1.
    std::uint32_t path_depth;
    /// Position among the children emitted at that step, 0 = most probable.
    std::uint32_t probability_rank;

    PageLocation location() const { return {page, offset}; }
};

/// Deltas the prefetcher could or could not compute from same-page pairs.
struct TransitionStats {
    std::uint64_t valid = 0;
    std::uint64_t invalidated = 0;
};

/// Common on-access contract of every prefetcher the simulator drives.
class Prefetcher {
public:
    virtual ~Prefetcher() = default;

    virtual std::vector<PrefetchCandidate> on_access(Address addr) = 0;
    virtual const LevelGeometry& geometry() const = 0;
    virtual TransitionStats transitions() const { return {}; }
};

} // namespace pangloss

#endif // PANGLOSS_PREFETCHER_HPP
