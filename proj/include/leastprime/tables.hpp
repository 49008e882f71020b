#pragma once

// CSV and LaTeX rendering of outlier lists and count tables.
//
// Outlier rows: n, phi(n), a, P(n), ratio (6 decimals), factorization.
// Count rows:   epsilon, count, then each estimator with its ratio to the
// count (2 decimals; "-" when the count is zero).

#include <span>
#include <string>
#include <string_view>

#include "leastprime/analysis.hpp"
#include "leastprime/result_io.hpp"

namespace leastprime {

enum class TableFormat { csv, latex };
TableFormat parse_table_format(std::string_view name);

enum class TableKind { large_outliers, small_outliers, count_table_large, count_table_small };
TableKind parse_table_kind(std::string_view name);

// "2^8·5^8" (csv) or "$2^{8} \cdot 5^{8}$" (latex); exponent 1 is omitted.
std::string format_factorization(std::span<const PrimePower> f, TableFormat format);

std::string emit_outliers(std::span<const OutlierRecord> outliers, TableFormat format);
std::string emit_count_table(const CountTable& table, TableFormat format);

// Renders a table straight from a complete result file. Outlier tables use
// epsilons.front(); count tables use the whole grid over [3, to).
std::string emit_table(const ResultFile& results, TableKind what, std::span<const double> epsilons,
                       TableFormat format);

} // namespace leastprime
