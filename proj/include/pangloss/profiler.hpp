#ifndef PANGLOSS_PROFILER_HPP
#define PANGLOSS_PROFILER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pangloss/core_model.hpp"
#include "pangloss/page_cache.hpp"

namespace pangloss {

/// True when some offset o keeps o, o+from and o+from+to all inside one page.
constexpr bool jointly_realizable(Delta from, Delta to, const LevelGeometry& geo)
{
    const std::int64_t a = 0, b = from, c = std::int64_t{from} + to;
    const std::int64_t lo = std::min({a, b, c});
    const std::int64_t hi = std::max({a, b, c});
    return hi - lo <= geo.max_delta();
}

/// Dense delta-transition counts over observable deltas [-(N-1), N-1].
class AdjacencyMatrix {
public:
    explicit AdjacencyMatrix(const LevelGeometry& geo)
        : geo_(geo), dim_(2 * geo.offsets_per_page - 1), counts_(std::size_t{dim_} * dim_, 0)
    {}

    const LevelGeometry& geometry() const { return geo_; }
    std::uint32_t dimension() const { return dim_; }
    std::uint64_t total() const { return total_; }

    std::size_t index_of(Delta d) const
    {
        if (!is_observable_delta(d, geo_))
            throw std::out_of_range("adjacency matrix: delta " + std::to_string(d) + " out of range");
        return static_cast<std::size_t>(d + geo_.max_delta());
    }
    Delta delta_at(std::size_t index) const { return static_cast<Delta>(index) - geo_.max_delta(); }

    void add(Delta from, Delta to, std::uint64_t n = 1)
    {
        if (!jointly_realizable(from, to, geo_))
            throw std::logic_error("adjacency matrix: transition (" + std::to_string(from) + ", " +
                                   std::to_string(to) + ") cannot occur inside one page");
        counts_[index_of(from) * dim_ + index_of(to)] += n;
        total_ += n;
    }

    std::uint64_t count(Delta from, Delta to) const { return counts_[index_of(from) * dim_ + index_of(to)]; }

    std::uint64_t row_sum(Delta from) const
    {
        const auto* row = counts_.data() + index_of(from) * dim_;
        std::uint64_t s = 0;
        for (std::uint32_t i = 0; i < dim_; ++i)
            s += row[i];
        return s;
    }

    std::uint64_t max_count() const
    {
        return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
    }

    struct Cell {
        Delta from;
        Delta to;
        std::uint64_t count;
        double probability; // within the from-row
    };

    /// Nonzero cells in (from, to) order.
    std::vector<Cell> nonzero_cells() const
    {
        std::vector<Cell> out;
        for (std::uint32_t f = 0; f < dim_; ++f) {
            const Delta from = delta_at(f);
            std::uint64_t rs = 0;
            for (std::uint32_t t = 0; t < dim_; ++t)
                rs += counts_[std::size_t{f} * dim_ + t];
            if (rs == 0)
                continue;
            for (std::uint32_t t = 0; t < dim_; ++t) {
                const auto c = counts_[std::size_t{f} * dim_ + t];
                if (c != 0)
                    out.push_back({from, delta_at(t), c, static_cast<double>(c) / rs});
            }
        }
        return out;
    }

private:
    LevelGeometry geo_;
    std::uint32_t dim_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

enum class ProfileMode {
    /// Count only when three consecutive accesses fall in one page.
    global_consecutive,
    /// Reconstruct per-page transitions through a page cache.
    per_page,
};

inline ProfileMode parse_profile_mode(std::string_view s)
{
    if (s == "global")
        return ProfileMode::global_consecutive;
    if (s == "per-page")
        return ProfileMode::per_page;
    throw std::invalid_argument("unknown profile mode '" + std::string(s) + "'");
}

inline AdjacencyMatrix profile(std::span<const AccessRecord> trace, const LevelGeometry& geo, ProfileMode mode)
{
    AdjacencyMatrix m(geo);
    if (mode == ProfileMode::global_consecutive) {
        for (std::size_t i = 2; i < trace.size(); ++i) {
            const auto a = split_address(trace[i - 2].address, geo);
            const auto b = split_address(trace[i - 1].address, geo);
            const auto c = split_address(trace[i].address, geo);
            if (a.page != b.page || b.page != c.page)
                continue;
            m.add(static_cast<Delta>(b.offset) - static_cast<Delta>(a.offset),
                  static_cast<Delta>(c.offset) - static_cast<Delta>(b.offset));
        }
        return m;
    }

    PageCache pc(geo);
    for (const auto& r : trace) {
        const auto loc = split_address(r.address, geo);
        const auto res = pc.access(loc.page, loc.offset);
        if (res.hit && res.prev_delta != geo.sentinel())
            m.add(res.prev_delta, res.current_delta);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Columns: from,to,count,probability (probability within the from-row).
inline void write_cells_csv(std::ostream& os, const AdjacencyMatrix& m)
{
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "from,to,count,probability\n";
    for (const auto& c : m.nonzero_cells())
        os << c.from << ',' << c.to << ',' << c.count << ',' << c.probability << '\n';
}

/// Binary P5 heatmap; x runs over `from`, y over `to`, both ascending.
/// Intensity is floor(255 * ln(1 + c) / ln(1 + max)).
inline void write_pgm(std::ostream& os, const AdjacencyMatrix& m)
{
    const auto dim = m.dimension();
    const auto max_c = m.max_count();
    os << "P5\n" << dim << ' ' << dim << "\n255\n";
    std::vector<unsigned char> row(dim);
    const double denom = std::log1p(static_cast<double>(max_c));
    for (std::uint32_t y = 0; y < dim; ++y) {
        const Delta to = m.delta_at(y);
        for (std::uint32_t x = 0; x < dim; ++x) {
            const auto c = m.count(m.delta_at(x), to);
            row[x] = c == 0 ? 0
                            : static_cast<unsigned char>(std::min(
                                  255.0, std::floor(255.0 * std::log1p(static_cast<double>(c)) / denom)));
        }
        os.write(reinterpret_cast<const char*>(row.data()), dim);
    }
}

/// "from to count prob" per line, most probable arcs first.
inline void write_edge_list(std::ostream& os, const AdjacencyMatrix& m)
{
    auto cells = m.nonzero_cells();
    std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
        return a.probability > b.probability;
    });
    os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& c : cells)
        os << c.from << ' ' << c.to << ' ' << c.count << ' ' << c.probability << '\n';
}

struct ExportPaths {
    std::string csv;
    std::string pgm;
    std::string edges;
};

inline ExportPaths export_matrix(const AdjacencyMatrix& m, const std::string& prefix)
{
    ExportPaths p{prefix + ".csv", prefix + ".pgm", prefix + ".edges.txt"};
    auto write = [](const std::string& path, auto&& emit) {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write '" + path + "'");
        emit(f);
        if (!f)
            throw std::runtime_error("write failed for '" + path + "'");
    };
    write(p.csv, [&](std::ostream& os) { write_cells_csv(os, m); });
    write(p.pgm, [&](std::ostream& os) { write_pgm(os, m); });
    write(p.edges, [&](std::ostream& os) { write_edge_list(os, m); });
    return p;
}

} // namespace pangloss

#endif // PANGLOSS_PROFILER_HPP
