#ifndef PANGLOSS_TRACEGEN_HPP
#define PANGLOSS_TRACEGEN_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pangloss/core_model.hpp"

namespace pangloss {

struct TraceSpec;

namespace pattern {

/// offset_n = start + n * delta
struct Stride {
    Delta delta;
};
/// Each step draws its delta uniformly from the list (seeded).
struct MultiDelta {
    std::vector<Delta> deltas;
};
/// Each step takes the next delta of the list, repeating.
struct ShortCycle {
    std::vector<Delta> deltas;
};
/// Stride stream; every `period`-th iteration also touches base + extra.
struct SecondaryAccess {
    Delta stride;
    Delta extra;
    std::uint32_t period = 1;
};
/// Random offsets in random pages of [base_page, base_page + pages).
struct UniformRandom {};
/// One access per sub-stream, round robin.
struct Interleaved {
    std::vector<TraceSpec> streams;
};

} // namespace pattern

using Pattern = std::variant<pattern::Stride, pattern::MultiDelta, pattern::ShortCycle,
                             pattern::SecondaryAccess, pattern::UniformRandom, pattern::Interleaved>;

struct TraceSpec {
    Pattern pattern = pattern::Stride{1};
    std::size_t length = 1;
    PageNumber base_page = PageNumber{1} << 20;
    Offset start_offset = 0;
    std::uint64_t pages = 1;
    std::uint64_t seed = 0;
};

class TraceError : public std::runtime_error {
public:
    TraceError(const std::string& what, std::size_t record)
        : std::runtime_error(what + " (record " + std::to_string(record) + ")"), record_(record)
    {}
    std::size_t record() const { return record_; }

private:
    std::size_t record_;
};

namespace detail {

inline void require(bool ok, const char* msg)
{
    if (!ok)
        throw std::invalid_argument(std::string("tracegen: ") + msg);
}

inline bool has_zero(const std::vector<Delta>& ds)
{
    for (auto d : ds)
        if (d == 0)
            return true;
    return false;
}

} // namespace detail

inline void validate(const TraceSpec& spec, const LevelGeometry& geo)
{
    using namespace pattern;
    detail::require(spec.length >= 1, "length must be >= 1");
    detail::require(spec.start_offset < geo.offsets_per_page, "start offset outside page");
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Stride>) {
                detail::require(p.delta != 0, "stride delta must be nonzero");
            } else if constexpr (std::is_same_v<P, MultiDelta> || std::is_same_v<P, ShortCycle>) {
                detail::require(!p.deltas.empty(), "delta list must be nonempty");
                detail::require(!detail::has_zero(p.deltas), "delta list must not contain 0");
            } else if constexpr (std::is_same_v<P, SecondaryAccess>) {
                detail::require(p.stride != 0, "stride delta must be nonzero");
                detail::require(p.extra != 0, "extra offset must be nonzero");
                detail::require(p.period >= 1, "period must be >= 1");
            } else if constexpr (std::is_same_v<P, UniformRandom>) {
                detail::require(spec.pages >= 1, "pages must be >= 1");
            } else {
                detail::require(!p.streams.empty(), "interleaved needs at least one stream");
                for (const auto& s : p.streams) {
                    detail::require(!std::holds_alternative<Interleaved>(s.pattern),
                                    "nested interleaving is not supported");
                    TraceSpec sub = s;
                    sub.length = 1;
                    validate(sub, geo);
                }
            }
        },
        spec.pattern);
}

/// Pure function of (spec, geo): same inputs, same trace.
inline std::vector<AccessRecord> generate(const TraceSpec& spec, const LevelGeometry& geo = kL2Geometry)
{
    using namespace pattern;
    validate(spec, geo);

    std::vector<AccessRecord> out;
    out.reserve(spec.length);
    std::mt19937_64 rng(spec.seed);
    const std::int64_t origin =
        static_cast<std::int64_t>(spec.base_page * geo.offsets_per_page + spec.start_offset);
    auto push = [&](std::int64_t pos) {
        if (pos < 0)
            throw std::invalid_argument("tracegen: pattern walks below address zero");
        out.push_back({static_cast<Address>(pos) << geo.granularity_shift});
    };

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Stride>) {
                for (std::size_t n = 0; n < spec.length; ++n)
                    push(origin + static_cast<std::int64_t>(n) * p.delta);
            } else if constexpr (std::is_same_v<P, ShortCycle> || std::is_same_v<P, MultiDelta>) {
                std::int64_t pos = origin;
                for (std::size_t n = 0; n < spec.length; ++n) {
                    push(pos);
                    const std::size_t k = std::is_same_v<P, ShortCycle> ? n % p.deltas.size()
                                                                        : rng() % p.deltas.size();
                    pos += p.deltas[k];
                }
            } else if constexpr (std::is_same_v<P, SecondaryAccess>) {
                for (std::int64_t n = 0; out.size() < spec.length; ++n) {
                    const std::int64_t pos = origin + n * p.stride;
                    push(pos);
                    if (out.size() < spec.length && n % p.period == 0)
                        push(pos + p.extra);
                }
            } else if constexpr (std::is_same_v<P, UniformRandom>) {
                for (std::size_t n = 0; n < spec.length; ++n) {
                    const PageNumber page = spec.base_page + rng() % spec.pages;
                    const Offset off = static_cast<Offset>(rng() % geo.offsets_per_page);
                    out.push_back({to_byte_address({page, off}, geo)});
                }
            } else {
                const std::size_t k = p.streams.size();
                std::vector<std::vector<AccessRecord>> subs;
                for (const auto& s : p.streams) {
                    TraceSpec sub = s;
                    sub.length = (spec.length + k - 1) / k;
                    subs.push_back(generate(sub, geo));
                }
                for (std::size_t n = 0; n < spec.length; ++n)
                    out.push_back(subs[n % k][n / k]);
            }
        },
        spec.pattern);
    return out;
}

// ---------------------------------------------------------------------------
// Pattern strings (CLI syntax)
//   stride:D  multi-delta:D,D,..  short-cycle:D,D,..  secondary:D,K[,P]
//   random  interleaved:SUB|SUB|..
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Delta> parse_delta_list(std::string_view s)
{
    std::vector<Delta> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto tok = s.substr(0, comma);
        Delta v{};
        const char* first = tok.data();
        if (!tok.empty() && tok.front() == '+')
            ++first;
        auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
            throw std::invalid_argument("bad delta '" + std::string(tok) + "'");
        out.push_back(v);
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    if (out.empty())
        throw std::invalid_argument("empty delta list");
    return out;
}

inline Pattern parse_simple_pattern(std::string_view s)
{
    const auto colon = s.find(':');
    const auto name = s.substr(0, colon);
    const auto args = colon == std::string_view::npos ? std::string_view{} : s.substr(colon + 1);
    if (name == "random")
        return pattern::UniformRandom{};
    if (name == "stride") {
        const auto v = parse_delta_list(args);
        if (v.size() != 1)
            throw std::invalid_argument("stride takes one delta");
        return pattern::Stride{v[0]};
    }
    if (name == "multi-delta")
        return pattern::MultiDelta{parse_delta_list(args)};
    if (name == "short-cycle")
        return pattern::ShortCycle{parse_delta_list(args)};
    if (name == "secondary") {
        const auto v = parse_delta_list(args);
        if (v.size() != 2 && v.size() != 3)
            throw std::invalid_argument("secondary takes stride,extra[,period]");
        if (v.size() == 3 && v[2] < 1)
            throw std::invalid_argument("secondary period must be >= 1");
        return pattern::SecondaryAccess{v[0], v[1], v.size() == 3 ? static_cast<std::uint32_t>(v[2]) : 1u};
    }
    throw std::invalid_argument("unknown pattern '" + std::string(s) + "'");
}

} // namespace detail

/// Page distance between interleaved sub-streams. Chosen so that the
/// streams differ in page-cache index and tag bits.
inline constexpr PageNumber kStreamSpacing = (PageNumber{1} << 20) + 4099;

/// Build a spec from CLI syntax; sub-streams get distinct page regions and seeds.
inline TraceSpec parse_trace_spec(std::string_view pattern_str, std::size_t length, std::uint64_t seed,
                                  PageNumber base_page = PageNumber{1} << 20, std::uint64_t pages = 1024)
{
    TraceSpec spec;
    spec.length = length;
    spec.seed = seed;
    spec.base_page = base_page;
    spec.pages = pages;
    constexpr std::string_view prefix = "interleaved:";
    if (pattern_str.substr(0, prefix.size()) == prefix) {
        pattern::Interleaved il;
        std::string_view rest = pattern_str.substr(prefix.size());
        std::size_t i = 0;
        while (true) {
            const auto bar = rest.find('|');
            TraceSpec sub = spec;
            sub.pattern = detail::parse_simple_pattern(rest.substr(0, bar));
            sub.base_page = base_page + i * kStreamSpacing;
            sub.seed = seed + i;
            il.streams.push_back(std::move(sub));
            ++i;
            if (bar == std::string_view::npos)
                break;
            rest.remove_prefix(bar + 1);
        }
        spec.pattern = std::move(il);
    } else {
        spec.pattern = detail::parse_simple_pattern(pattern_str);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Trace files: text (lowercase hex byte address per line, LF) or binary
// (little-endian 64-bit addresses, no header).
// ---------------------------------------------------------------------------

enum class TraceFormat { text, binary };

inline TraceFormat parse_trace_format(std::string_view s)
{
    if (s == "text")
        return TraceFormat::text;
    if (s == "bin" || s == "binary")
        return TraceFormat::binary;
    throw std::invalid_argument("unknown trace format '" + std::string(s) + "'");
}

/// ".bin" files are binary, anything else text.
inline TraceFormat guess_trace_format(std::string_view path)
{
    return path.size() >= 4 && path.substr(path.size() - 4) == ".bin" ? TraceFormat::binary
                                                                       : TraceFormat::text;
}

inline void write_text_trace(std::ostream& os, std::span<const AccessRecord> trace)
{
    char buf[17];
    for (const auto& r : trace) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.address, 16);
        os.write(buf, end - buf);
        os.put('\n');
    }
}

inline std::vector<AccessRecord> read_text_trace(std::istream& is)
{
    std::vector<AccessRecord> out;
    std::string line;
    for (std::size_t i = 0; std::getline(is, line); ++i) {
        std::string_view sv = line;
        if (!sv.empty() && sv.back() == '\r')
            sv.remove_suffix(1);
        if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'x' || sv[1] == 'X'))
            sv.remove_prefix(2);
        Address a{};
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), a, 16);
        if (sv.empty() || ec != std::errc{} || ptr != sv.data() + sv.size())
            throw TraceError("malformed hex address '" + line + "'", i);
        out.push_back({a});
    }
    return out;
}

inline void write_binary_trace(std::ostream& os, std::span<const AccessRecord> trace)
{
    for (const auto& r : trace) {
        char b[8];
        for (int k = 0; k < 8; ++k)
            b[k] = static_cast<char>((r.address >> (8 * k)) & 0xff);
        os.write(b, 8);
    }
}

inline std::vector<AccessRecord> read_binary_trace(std::istream& is)
{
    std::vector<AccessRecord> out;
    unsigned char b[8];
    while (true) {
        is.read(reinterpret_cast<char*>(b), 8);
        const auto got = is.gcount();
        if (got == 0)
            break;
        if (got != 8)
            throw TraceError("truncated binary record", out.size());
        Address a = 0;
        for (int k = 0; k < 8; ++k)
            a |= Address{b[k]} << (8 * k);
        out.push_back({a});
    }
    return out;
}

inline std::vector<AccessRecord> load_trace(const std::string& path, TraceFormat fmt)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open trace '" + path + "'");
    return fmt == TraceFormat::binary ? read_binary_trace(in) : read_text_trace(in);
}

inline void save_trace(const std::string& path, std::span<const AccessRecord> trace, TraceFormat fmt)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write trace '" + path + "'");
    if (fmt == TraceFormat::binary)
        write_binary_trace(out, trace);
    else
        write_text_trace(out, trace);
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace pangloss

#endif // PANGLOSS_TRACEGEN_HPP
