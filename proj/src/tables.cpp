#include "leastprime/tables.hpp"

#include <cmath>

#include <fmt/format.h>

namespace leastprime {

namespace {

std::string format_epsilon(double e)
{
    const double tenths = std::round(e * 10);
    if (std::abs(tenths - e * 10) < 1e-9) return fmt::format("{:.1f}", e);
    return fmt::format("{}", e);
}

std::string column_title(std::string_view id)
{
    if (id == columns::closed_form) return "$(N^{1-\\epsilon}-1)/(1-\\epsilon)$";
    if (id == columns::closed_form_over_logN) return "$\\frac{N^{1-\\epsilon}-1}{(1-\\epsilon)\\log(N)}$";
    if (id == columns::closed_form_times_loglogN) return "$\\log\\log(N)\\frac{N^{1-\\epsilon}-1}{1-\\epsilon}$";
    if (id == columns::sum_phi_pow) return "$\\sum_{k=3}^N \\frac{1}{\\phi(k)^{\\epsilon}}$";
    if (id == columns::sum_k_pow) return "$\\sum_{k=3}^N \\frac{1}{k^{\\epsilon}}$";
    if (id == columns::sum_phi_over_k) return "$\\sum_{k=3}^N \\frac{\\phi(k)}{k^{\\epsilon+1}}$";
    if (id == columns::int_log_loglog) return "$\\int e^{-k^\\epsilon/(\\log k\\log\\log k)}{\\rm dk}$";
    if (id == columns::int_log) return "$\\int e^{-k^\\epsilon/(\\log k)}{\\rm dk}$";
    if (id == columns::int_loglog) return "$\\int e^{-k^\\epsilon/(\\log\\log k)}{\\rm dk}$";
    return std::string(id);
}

} // namespace

TableFormat parse_table_format(std::string_view name)
{
    if (name == "csv") return TableFormat::csv;
    if (name == "latex") return TableFormat::latex;
    throw InvalidArgument(fmt::format("unknown format '{}'", name));
}

TableKind parse_table_kind(std::string_view name)
{
    if (name == "large-outliers") return TableKind::large_outliers;
    if (name == "small-outliers") return TableKind::small_outliers;
    if (name == "count-table-large") return TableKind::count_table_large;
    if (name == "count-table-small") return TableKind::count_table_small;
    throw InvalidArgument(fmt::format("unknown table '{}'", name));
}

std::string format_factorization(std::span<const PrimePower> f, TableFormat format)
{
    std::string out;
    const bool latex = format == TableFormat::latex;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0) out += latex ? " \\cdot " : "·";
        out += std::to_string(f[i].prime);
        if (f[i].exponent > 1) out += latex ? fmt::format("^{{{}}}", f[i].exponent) : fmt::format("^{}", f[i].exponent);
    }
    if (f.empty()) out = "1";
    return latex ? "$" + out + "$" : out;
}

std::string emit_outliers(std::span<const OutlierRecord> outliers, TableFormat format)
{
    std::string out;
    if (format == TableFormat::csv) {
        out = "n,phi,a,p,ratio,factorization\n";
        for (const auto& o : outliers)
            out += fmt::format("{},{},{},{},{:.6f},{}\n", o.record.n, o.record.phi, o.record.a, o.record.p, o.ratio,
                               format_factorization(o.factorization, format));
        return out;
    }
    out = "% $n$ & $\\phi(n)$ & $a$ & $P(n)$ & $P(n)/\\phi(n)\\log(n)\\log(\\phi(n))$ & factorization \\\\\n";
    for (const auto& o : outliers)
        out += fmt::format("{} & {} & {} & {} & {:.6f} & {} \\\\\n", o.record.n, o.record.phi, o.record.a, o.record.p,
                           o.ratio, format_factorization(o.factorization, format));
    return out;
}

std::string emit_count_table(const CountTable& table, TableFormat format)
{
    std::string out;
    if (table.rows.empty()) return out;
    const auto& first = table.rows.front().estimators.values;
    const char* set = table.kind == OutlierKind::large ? "E" : "F";

    if (format == TableFormat::csv) {
        out = "epsilon,count";
        for (const auto& [name, v] : first) out += fmt::format(",{},{}_ratio", name, name);
        out += '\n';
        for (const auto& row : table.rows) {
            out += fmt::format("{},{}", format_epsilon(row.epsilon), row.count);
            for (std::size_t i = 0; i < row.estimators.values.size(); ++i) {
                const auto& r = row.ratios[i].second;
                out += fmt::format(",{:.2f},{}", row.estimators.values[i].second, r ? fmt::format("{:.2f}", *r) : "-");
            }
            out += '\n';
        }
        return out;
    }

    out = fmt::format("% N={}\n$\\epsilon$ & $|{}_\\epsilon(3,N)|$", table.N, set);
    for (const auto& [name, v] : first) out += " & " + column_title(name);
    out += " \\\\\n\\hline\n";
    for (const auto& row : table.rows) {
        out += fmt::format("${}$ & ${}$", format_epsilon(row.epsilon), row.count);
        for (std::size_t i = 0; i < row.estimators.values.size(); ++i) {
            const auto& r = row.ratios[i].second;
            out += fmt::format(" & ${:.2f}$ (${}$)", row.estimators.values[i].second,
                               r ? fmt::format("{:.2f}", *r) : "-");
        }
        out += "\\\\\n";
    }
    return out;
}

std::string emit_table(const ResultFile& results, TableKind what, std::span<const double> epsilons,
                       TableFormat format)
{
    if (epsilons.empty()) throw InvalidArgument("at least one epsilon is required");
    const auto& h = results.header;
    if (what == TableKind::large_outliers || what == TableKind::small_outliers) {
        const auto kind = what == TableKind::large_outliers ? OutlierKind::large : OutlierKind::small;
        const auto sqrt_to = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(h.to))) + 2;
        const auto table = build_prime_table(std::max<std::uint64_t>(sqrt_to, 16));
        const auto set = outlier_set(results.records, epsilons.front(), kind, std::max<std::uint64_t>(3, h.from),
                                     h.to, table);
        return emit_outliers(set, format);
    }
    const auto kind = what == TableKind::count_table_large ? OutlierKind::large : OutlierKind::small;
    const auto phi = build_phi_table(kind == OutlierKind::large ? h.to : 1);
    return emit_count_table(count_table(results.records, kind, epsilons, h.to, phi), format);
}

} // namespace leastprime
