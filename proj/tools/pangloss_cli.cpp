// Command-line harness: trace generation, simulation, profiling and the
// storage budget table.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "pangloss/pangloss.hpp"

namespace {

using namespace pangloss;

std::vector<AccessRecord> load(const std::string& path, const std::string& format)
{
    const TraceFormat fmt = format == "auto" ? guess_trace_format(path) : parse_trace_format(format);
    auto trace = load_trace(path, fmt);
    if (trace.empty())
        throw std::runtime_error("trace '" + path + "' is empty");
    return trace;
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

std::uint64_t effective_seed(std::uint64_t flag_seed)
{
    if (const char* env = std::getenv("PANGLOSS_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used, 0);
            if (used == std::string(env).size())
                return v;
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("PANGLOSS_SEED is not an integer: '") + env + "'");
    }
    return flag_seed;
}

struct GenArgs {
    std::string pattern;
    std::size_t length = 100000;
    std::uint64_t seed = 0;
    std::string format = "text";
    std::string out;
    std::string level = "l2";
    PageNumber base_page = PageNumber{1} << 20;
    std::uint64_t pages = 1024;
    Offset start_offset = 0;
};

struct RunArgs {
    std::string trace;
    std::string trace_format = "auto";
    std::string prefetcher = "pangloss";
    std::string level = "l2";
    std::uint32_t degree = 4;
    std::uint32_t max_steps = 0;
    std::uint64_t cache_kb = 512;
    std::uint32_t ways = 8;
    std::size_t warmup = 0;
    std::string out_metrics;
    std::string out_csv;
};

struct ProfileArgs {
    std::string trace;
    std::string trace_format = "auto";
    std::string level = "l2";
    std::string mode = "per-page";
    std::string out_prefix;
};

struct DumpArgs {
    std::string trace;
    std::string trace_format = "auto";
    std::string prefetcher = "pangloss";
    std::string level = "l2";
    std::uint32_t degree = 4;
    std::string out_prefix;
};

int cmd_gen(const GenArgs& a)
{
    const auto& geo = level_geometry(a.level);
    auto spec = parse_trace_spec(a.pattern, a.length, effective_seed(a.seed), a.base_page, a.pages);
    spec.start_offset = a.start_offset;
    const auto trace = generate(spec, geo);
    save_trace(a.out, trace, parse_trace_format(a.format));
    std::cerr << "wrote " << trace.size() << " records to " << a.out << '\n';
    return 0;
}

RunConfig make_run_config(const RunArgs& a)
{
    RunConfig cfg;
    cfg.prefetcher = parse_prefetcher_kind(a.prefetcher);
    cfg.geo = level_geometry(a.level);
    cfg.degree = a.degree;
    cfg.max_steps = a.max_steps == 0 ? 2 * a.degree : a.max_steps;
    cfg.cache = {a.cache_kb * 1024, 64, a.ways};
    cfg.cache.validate();
    cfg.warmup = a.warmup;
    cfg.engine().validate();
    return cfg;
}

int cmd_run(const RunArgs& a)
{
    const RunConfig cfg = make_run_config(a);
    const auto trace = load(a.trace, a.trace_format);
    const SimMetrics m = run_configured(trace, cfg);
    const std::string json = run_report(cfg, m, trace, a.trace).dump(2) + "\n";
    if (a.out_metrics.empty())
        std::cout << json;
    else
        write_file(a.out_metrics, json);
    if (!a.out_csv.empty()) {
        std::ostringstream csv;
        write_metrics_csv(csv, cfg, m);
        write_file(a.out_csv, csv.str());
    }
    return 0;
}

int cmd_profile(const ProfileArgs& a)
{
    const auto& geo = level_geometry(a.level);
    const auto trace = load(a.trace, a.trace_format);
    const auto m = profile(trace, geo, parse_profile_mode(a.mode));
    const auto paths = export_matrix(m, a.out_prefix);
    std::cerr << m.total() << " transitions, " << m.nonzero_cells().size() << " nonzero cells -> "
              << paths.csv << ", " << paths.pgm << ", " << paths.edges << '\n';
    return 0;
}

int cmd_dump_state(const DumpArgs& a)
{
    const auto cfg = EngineConfig::for_level(level_geometry(a.level), a.degree);
    const auto trace = load(a.trace, a.trace_format);
    const auto kind = parse_prefetcher_kind(a.prefetcher);
    std::ostringstream delta_csv, page_csv;
    if (kind == PrefetcherKind::pangloss) {
        PanglossEngine engine(cfg);
        for (const auto& r : trace)
            engine.on_access(r.address);
        engine.delta_cache().write_csv(delta_csv);
        engine.page_cache().write_csv(page_csv);
        write_file(a.out_prefix + ".page_cache.csv", page_csv.str());
    } else if (kind == PrefetcherKind::global_delta_markov) {
        GlobalDeltaPrefetcher pf(cfg);
        for (const auto& r : trace)
            pf.on_access(r.address);
        pf.delta_cache().write_csv(delta_csv);
    } else {
        throw std::invalid_argument("dump-state needs a prefetcher with a delta cache");
    }
    write_file(a.out_prefix + ".delta_cache.csv", delta_csv.str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pangloss delta-transition prefetcher simulator"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a synthetic trace");
    g->add_option("--pattern", gen.pattern,
                  "stride:D | multi-delta:D,.. | short-cycle:D,.. | secondary:D,K[,P] | random | "
                  "interleaved:SUB|SUB..")
        ->required();
    g->add_option("--length", gen.length, "Number of accesses")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "RNG seed (PANGLOSS_SEED overrides)");
    g->add_option("--format", gen.format, "Output format")->check(CLI::IsMember({"text", "bin"}));
    g->add_option("--out", gen.out, "Output file")->required();
    g->add_option("--level", gen.level, "Offset granularity")->check(CLI::IsMember({"l1", "l2"}));
    g->add_option("--base-page", gen.base_page, "First page number");
    g->add_option("--pages", gen.pages, "Page count for random patterns")->check(CLI::PositiveNumber);
    g->add_option("--start-offset", gen.start_offset, "Offset of the first access");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Simulate one cache level with a prefetcher");
    r->add_option("--trace", run.trace, "Trace file")->required();
    r->add_option("--trace-format", run.trace_format)->check(CLI::IsMember({"auto", "text", "bin"}));
    r->add_option("--prefetcher", run.prefetcher)
        ->check(CLI::IsMember({"pangloss", "next-line", "global-delta", "none"}));
    r->add_option("--level", run.level)->check(CLI::IsMember({"l1", "l2"}));
    r->add_option("--degree", run.degree, "Prefetch degree")->check(CLI::PositiveNumber);
    r->add_option("--max-steps", run.max_steps, "Traversal step bound (0: 2 x degree)");
    r->add_option("--cache-kb", run.cache_kb, "Cache size in KiB")->check(CLI::PositiveNumber);
    r->add_option("--ways", run.ways, "Cache associativity")->check(CLI::PositiveNumber);
    r->add_option("--warmup", run.warmup, "Accesses excluded from metrics");
    r->add_option("--out-metrics", run.out_metrics, "Metrics JSON (stdout if omitted)");
    r->add_option("--out-csv", run.out_csv, "Metrics CSV row");

    ProfileArgs prof;
    auto* p = app.add_subcommand("profile", "Count delta transitions into an adjacency matrix");
    p->add_option("--trace", prof.trace)->required();
    p->add_option("--trace-format", prof.trace_format)->check(CLI::IsMember({"auto", "text", "bin"}));
    p->add_option("--level", prof.level)->check(CLI::IsMember({"l1", "l2"}));
    p->add_option("--mode", prof.mode)->check(CLI::IsMember({"global", "per-page"}));
    p->add_option("--out-prefix", prof.out_prefix)->required();

    auto* s = app.add_subcommand("space", "Print the storage budget table");

    DumpArgs dump;
    auto* d = app.add_subcommand("dump-state", "Dump delta/page cache contents after a trace");
    d->add_option("--trace", dump.trace)->required();
    d->add_option("--trace-format", dump.trace_format)->check(CLI::IsMember({"auto", "text", "bin"}));
    d->add_option("--prefetcher", dump.prefetcher)->check(CLI::IsMember({"pangloss", "global-delta"}));
    d->add_option("--level", dump.level)->check(CLI::IsMember({"l1", "l2"}));
    d->add_option("--degree", dump.degree)->check(CLI::PositiveNumber);
    d->add_option("--out-prefix", dump.out_prefix)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed())
            return cmd_gen(gen);
        if (r->parsed())
            return cmd_run(run);
        if (p->parsed())
            return cmd_profile(prof);
        if (s->parsed()) {
            write_space_table(std::cout);
            return 0;
        }
        if (d->parsed())
            return cmd_dump_state(dump);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
