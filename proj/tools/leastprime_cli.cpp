// leastprime: compute P(n) over a modulus range and analyze the results.
//
//   leastprime compute   --to 100000 --output p.csv [--workers 8]
//   leastprime resume    --to 100000 --output p.csv
//   leastprime outliers  --input p.csv --kind large --epsilon 1.0
//   leastprime counts    --input p.csv --kind small --epsilon 0,0.1,0.2
//   leastprime verify    --input p.csv
//   leastprime estimators --to 100000000 --kind large --epsilon 1.0 --c3 1

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "leastprime/analysis.hpp"
#include "leastprime/heuristics.hpp"
#include "leastprime/runner.hpp"
#include "leastprime/tables.hpp"

using namespace leastprime;

namespace {

constexpr std::uint64_t kFullScaleTo = 100000000;

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidArgument(fmt::format("bad epsilon value '{}'", item));
        }
    }
    if (out.empty()) throw InvalidArgument("no epsilon given");
    return out;
}

std::vector<double> default_grid(OutlierKind kind)
{
    std::vector<double> g;
    const int last = kind == OutlierKind::large ? 15 : 7;
    for (int i = 0; i <= last; ++i) g.push_back(i / 10.0);
    return g;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", path);
    out << text;
}

// Streams a result file, optionally checking every certificate against a
// prime table that grows on demand.
template <class F>
std::pair<ResultHeader, std::uint64_t> stream_results(const std::string& path, bool certify, std::uint64_t budget,
                                                      F&& f)
{
    std::unique_ptr<PrimeTable> table;
    std::uint64_t limit = 0;
    return for_each_record(path, [&](const PminRecord& r) {
        if (certify) {
            if (!table || r.p > table->limit()) {
                limit = std::max(2 * r.p, limit == 0 ? default_prime_limit(r.n + 1024) : 2 * limit);
                table = std::make_unique<PrimeTable>(build_prime_table(limit, SieveConfig{1 << 20, budget}));
            }
            verify_certificate(r, *table);
        }
        f(r);
    });
}

struct Options {
    std::uint64_t from = 3;
    std::uint64_t to = 0;
    bool full_scale = false;
    std::string strategy = "hybrid";
    unsigned workers = 1;
    std::uint64_t prime_limit = 0;
    std::string checkpoint;
    std::string output;
    std::string input;
    std::uint64_t chunk = 1024;
    std::uint64_t memory_budget_mib = kDefaultMemoryBudget >> 20;
    std::string epsilon;
    std::string kind = "large";
    std::string format = "csv";
    double c3 = 1.0;
    bool certify = false;
};

RunManifest make_manifest(const Options& o)
{
    RunManifest m;
    m.from = o.full_scale ? 3 : o.from;
    m.to = o.full_scale ? kFullScaleTo : o.to;
    m.strategy = parse_strategy(o.strategy);
    m.workers = o.workers;
    m.prime_limit = o.prime_limit;
    m.output_path = o.output;
    m.checkpoint_path = o.checkpoint.empty() ? o.output + ".ckpt" : o.checkpoint;
    m.chunk = o.chunk;
    m.sieve.memory_budget = o.memory_budget_mib << 20;
    return m;
}

void print_report(const RunReport& r)
{
    std::cerr << fmt::format("[leastprime] wrote {} records, last n={}, table extensions={}{}{}\n",
                             r.records_written, r.last_n, r.table_extensions,
                             r.repaired_bytes ? fmt::format(", repaired {} bytes", r.repaired_bytes) : "",
                             r.completed ? ", complete" : "");
}

ResultHeader read_header(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open result file", path);
    std::string line;
    std::getline(in, line);
    const auto header = ResultHeader::parse(line);
    if (!header) throw IntegrityFailure(fmt::format("{}:1: malformed header", path));
    return *header;
}

int cmd_outliers(const Options& o)
{
    const auto kind = parse_outlier_kind(o.kind);
    const auto eps = o.epsilon.empty() ? std::vector<double>{kind == OutlierKind::large ? 1.0 : 0.5}
                                       : parse_grid(o.epsilon);
    const auto header = read_header(o.input);
    // Factorizing n < to needs primes up to sqrt(to).
    const auto small = build_prime_table(static_cast<std::uint64_t>(std::sqrt(double(header.to))) + 64);
    OutlierCollector collector(eps.front(), kind, std::max<std::uint64_t>(3, header.from), header.to, small);
    stream_results(o.input, o.certify, o.memory_budget_mib << 20, [&](const PminRecord& r) { collector.add(r); });
    write_text(o.output, emit_outliers(collector.outliers(), parse_table_format(o.format)));
    return 0;
}

int cmd_counts(const Options& o)
{
    const auto kind = parse_outlier_kind(o.kind);
    const auto grid = o.epsilon.empty() ? default_grid(kind) : parse_grid(o.epsilon);
    const auto header = read_header(o.input);
    if (header.from > 3) throw InvalidArgument("count tables need results starting at n = 3");
    OutlierCounter counter(kind, grid, header.to);
    const auto [h, count] =
        stream_results(o.input, o.certify, o.memory_budget_mib << 20, [&](const PminRecord& r) { counter.add(r); });
    if (count != header.to - header.from)
        std::cerr << fmt::format("leastprime: warning: {} holds only {} of {} records\n", o.input, count,
                                 header.to - header.from);
    const auto phi = build_phi_table(kind == OutlierKind::large ? header.to : 16, o.memory_budget_mib << 20);
    write_text(o.output, emit_count_table(finish_count_table(counter, phi), parse_table_format(o.format)));
    return 0;
}

int cmd_verify(const Options& o)
{
    BoundVerifier verifier;
    const auto [header, count] =
        stream_results(o.input, o.certify, o.memory_budget_mib << 20, [&](const PminRecord& r) { verifier.add(r); });
    std::string out = fmt::format("range [{}, {}), {} records{}\n", header.from, header.to, count,
                                  count == header.to - header.from ? "" : " (incomplete)");
    for (const auto& rep : verifier.reports()) {
        out += fmt::format("{}: checked {}, violations {}", rep.check.name, rep.checked, rep.violations.size());
        for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i)
            out += (i == 0 ? " [" : ", ") + std::to_string(rep.violations[i]);
        if (!rep.violations.empty()) out += rep.violations.size() > 20 ? ", ...]" : "]";
        out += '\n';
    }
    write_text(o.output, out);
    return 0;
}

int cmd_estimators(const Options& o)
{
    if (o.to < 4) throw InvalidArgument("--to (N) must be >= 4");
    const auto kind = parse_outlier_kind(o.kind);
    const auto grid = o.epsilon.empty() ? default_grid(kind) : parse_grid(o.epsilon);
    const auto format = parse_table_format(o.format);
    const bool latex = format == TableFormat::latex;

    std::vector<EstimatorRow> rows;
    std::vector<double> refined;
    if (kind == OutlierKind::large) {
        const auto phi = build_phi_table(o.to, o.memory_budget_mib << 20);
        rows = large_estimators(o.to, grid, phi);
        for (double e : grid) {
            double s = 0;
            for (std::uint64_t n = 3; n <= o.to; ++n) s += refined_exceedance(n, e, phi[n], o.c3);
            refined.push_back(s);
        }
    } else {
        for (double e : grid) rows.push_back(small_estimators(o.to, e));
    }

    std::string out = latex ? "% " : "";
    out += "epsilon";
    for (const auto& [name, v] : rows.front().values) out += (latex ? " & " : ",") + name;
    if (!refined.empty()) out += latex ? " & refined_c3" : ",refined_c3";
    out += latex ? " \\\\\n" : "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += latex ? fmt::format("${:.1f}$", rows[i].epsilon) : fmt::format("{}", rows[i].epsilon);
        for (const auto& [name, v] : rows[i].values) out += latex ? fmt::format(" & ${:.2f}$", v) : fmt::format(",{:.6f}", v);
        if (!refined.empty())
            out += latex ? fmt::format(" & ${:.2f}$", refined[i]) : fmt::format(",{:.6f}", refined[i]);
        out += latex ? " \\\\\n" : "\n";
    }
    write_text(o.output, out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Least primes in arithmetic progressions: compute P(n) and analyze outliers"};
    app.require_subcommand(1);
    Options o;

    auto add_run_flags = [&](CLI::App* c) {
        c->add_option("--from", o.from, "first modulus (>= 3)");
        c->add_option("--to", o.to, "one past the last modulus");
        c->add_flag("--full-scale", o.full_scale, "compute 3 <= n < 10^8");
        c->add_option("--strategy", o.strategy, "by-class | by-scan | hybrid | cross-check");
        c->add_option("--workers", o.workers, "worker threads");
        c->add_option("--prime-limit", o.prime_limit, "prime table limit (default 3 N ln^2 N)");
        c->add_option("--checkpoint", o.checkpoint, "checkpoint file (default <output>.ckpt)");
        c->add_option("--output", o.output, "result file")->required();
        c->add_option("--chunk", o.chunk, "moduli per work unit");
        c->add_option("--memory-budget", o.memory_budget_mib, "per-table memory budget in MiB");
    };
    auto add_input_flags = [&](CLI::App* c) {
        c->add_option("--input", o.input, "result file to analyze")->required();
        c->add_option("--output", o.output, "write here instead of stdout");
        c->add_flag("--certify", o.certify, "check every record's certificate while reading");
        c->add_option("--memory-budget", o.memory_budget_mib, "per-table memory budget in MiB");
    };

    auto* compute = app.add_subcommand("compute", "compute P(n) over [from, to)");
    add_run_flags(compute);
    auto* resume_cmd = app.add_subcommand("resume", "continue an interrupted compute run");
    add_run_flags(resume_cmd);

    auto* outliers = app.add_subcommand("outliers", "list large or small outliers");
    add_input_flags(outliers);
    outliers->add_option("--kind", o.kind, "large | small");
    outliers->add_option("--epsilon", o.epsilon, "outlier threshold");
    outliers->add_option("--format", o.format, "csv | latex");

    auto* counts = app.add_subcommand("counts", "outlier counts with estimator comparisons");
    add_input_flags(counts);
    counts->add_option("--kind", o.kind, "large | small");
    counts->add_option("--epsilon", o.epsilon, "comma-separated epsilon grid");
    counts->add_option("--format", o.format, "csv | latex");

    auto* verify = app.add_subcommand("verify", "check the conjectured bounds on P(n)");
    add_input_flags(verify);

    auto* estimators = app.add_subcommand("estimators", "evaluate the count estimators without P(n) data");
    estimators->add_option("--to", o.to, "N")->required();
    estimators->add_option("--kind", o.kind, "large | small");
    estimators->add_option("--epsilon", o.epsilon, "comma-separated epsilon grid");
    estimators->add_option("--format", o.format, "csv | latex");
    estimators->add_option("--c3", o.c3, "constant of the refined exceedance estimate (large only)");
    estimators->add_option("--output", o.output, "write here instead of stdout");
    estimators->add_option("--memory-budget", o.memory_budget_mib, "per-table memory budget in MiB");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::invalid_arguments);
    }

    try {
        if (*compute) {
            print_report(run_range(make_manifest(o)));
        } else if (*resume_cmd) {
            print_report(resume(make_manifest(o)));
        } else if (*outliers) {
            return cmd_outliers(o);
        } else if (*counts) {
            return cmd_counts(o);
        } else if (*verify) {
            return cmd_verify(o);
        } else if (*estimators) {
            return cmd_estimators(o);
        }
    } catch (const Error& e) {
        std::cerr << "leastprime: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::bad_alloc&) {
        std::cerr << "leastprime: out of memory\n";
        return static_cast<int>(ExitCode::resource_limit);
    } catch (const std::exception& e) {
        std::cerr << "leastprime: " << e.what() << '\n';
        return static_cast<int>(ExitCode::integrity_failure);
    }
    return 0;
}
