#include "leastprime/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace leastprime {

double normalizer(std::uint64_t n, std::uint64_t phi)
{
    if (n < 3) throw InvalidArgument(fmt::format("normalizer needs n >= 3, got {}", n));
    const double f = static_cast<double>(phi);
    return f * std::log(static_cast<double>(n)) * std::log(f);
}

double ratio(const PminRecord& rec) { return static_cast<double>(rec.p) / normalizer(rec.n, rec.phi); }

std::string_view to_string(OutlierKind kind) { return kind == OutlierKind::large ? "large" : "small"; }

OutlierKind parse_outlier_kind(std::string_view name)
{
    if (name == "large") return OutlierKind::large;
    if (name == "small") return OutlierKind::small;
    throw InvalidArgument(fmt::format("unknown outlier kind '{}'", name));
}

bool is_outlier(const PminRecord& rec, double epsilon, OutlierKind kind)
{
    const double b = normalizer(rec.n, rec.phi);
    const double p = static_cast<double>(rec.p);
    return kind == OutlierKind::large ? p > (1 + epsilon) * b : p < (1 - epsilon) * b;
}

OutlierCollector::OutlierCollector(double epsilon, OutlierKind kind, std::uint64_t x, std::uint64_t y,
                                   const PrimeTable& table)
    : epsilon_(epsilon), kind_(kind), x_(x), y_(y), table_(&table)
{
    if (x < 3) throw InvalidArgument(fmt::format("outlier range must start at n >= 3, got {}", x));
    if (kind == OutlierKind::small && !(epsilon < 1))
        throw InvalidArgument(fmt::format("small outliers need epsilon < 1, got {}", epsilon));
}

void OutlierCollector::add(const PminRecord& rec)
{
    if (rec.n <= last_n_) throw InvalidArgument(fmt::format("records out of order at n={}", rec.n));
    last_n_ = rec.n;
    if (rec.n < x_ || rec.n >= y_ || !is_outlier(rec, epsilon_, kind_)) return;

    OutlierRecord o{rec, ratio(rec), factorize(rec.n, *table_)};
    if (multiply_out(o.factorization) != rec.n || totient(o.factorization) != rec.phi)
        throw IntegrityFailure(fmt::format("factorization of {} inconsistent with record", rec.n));
    out_.push_back(std::move(o));
}

std::vector<OutlierRecord> outlier_set(std::span<const PminRecord> records, double epsilon, OutlierKind kind,
                                       std::uint64_t x, std::uint64_t y, const PrimeTable& table)
{
    OutlierCollector c(epsilon, kind, x, y, table);
    for (const auto& r : records) c.add(r);
    return c.take();
}

OutlierCounter::OutlierCounter(OutlierKind kind, std::vector<double> eps_grid, std::uint64_t N)
    : kind_(kind), grid_(std::move(eps_grid)), N_(N), counts_(grid_.size(), 0)
{
    if (grid_.empty()) throw InvalidArgument("epsilon grid is empty");
    if (!std::is_sorted(grid_.begin(), grid_.end())) throw InvalidArgument("epsilon grid must be sorted");
    if (kind == OutlierKind::small && !(grid_.back() < 1))
        throw InvalidArgument("small outliers need epsilon < 1");
}

void OutlierCounter::add(const PminRecord& rec)
{
    if (rec.n < 3 || rec.n >= N_) return;
    // The grid is sorted and outlier sets shrink as eps grows, so stop at the
    // first epsilon that rejects the record.
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        if (!is_outlier(rec, grid_[j], kind_)) break;
        ++counts_[j];
    }
}

CountTable finish_count_table(const OutlierCounter& counter, const PhiTable& phi)
{
    CountTable table{counter.N(), counter.kind(), {}};
    const auto& grid = counter.grid();
    std::vector<EstimatorRow> est;
    if (counter.kind() == OutlierKind::large) {
        est = large_estimators(counter.N(), grid, phi);
    } else {
        for (double e : grid) est.push_back(small_estimators(counter.N(), e));
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CountRow row{grid[j], counter.counts()[j], std::move(est[j]), {}};
        for (const auto& [name, v] : row.estimators.values) {
            std::optional<double> r;
            if (row.count > 0) r = v / static_cast<double>(row.count);
            row.ratios.emplace_back(name, r);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CountTable count_table(std::span<const PminRecord> records, OutlierKind kind, std::span<const double> eps_grid,
                       std::uint64_t N, const PhiTable& phi)
{
    OutlierCounter counter(kind, std::vector<double>(eps_grid.begin(), eps_grid.end()), N);
    for (const auto& r : records) counter.add(r);
    return finish_count_table(counter, phi);
}

std::vector<BoundCheck> default_bound_checks()
{
    return {
        {"upper 3.0 for n > 3", true, 3.0, 3},
        {"lower 0.5 for n > 570", false, 0.5, 570},
        {"upper 2.4 for n > 6", true, 2.4, 6},
        {"lower 0.6 for n > 6840", false, 0.6, 6840},
        {"lower 0.7 for n > 198660", false, 0.7, 198660},
    };
}

BoundVerifier::BoundVerifier(std::vector<BoundCheck> checks)
{
    for (auto& c : checks) reports_.push_back({std::move(c), 0, {}});
}

void BoundVerifier::add(const PminRecord& rec)
{
    if (rec.n <= last_n_) throw InvalidArgument(fmt::format("records out of order at n={}", rec.n));
    last_n_ = rec.n;
    if (rec.n < 3) return;
    const double b = normalizer(rec.n, rec.phi);
    const double p = static_cast<double>(rec.p);
    for (auto& r : reports_) {
        if (rec.n <= r.check.threshold) continue;
        ++r.checked;
        const bool ok = r.check.upper ? p < r.check.factor * b : p > r.check.factor * b;
        if (!ok) r.violations.push_back(rec.n);
    }
}

std::vector<BoundReport> verify_bounds(std::span<const PminRecord> records, std::vector<BoundCheck> checks)
{
    BoundVerifier v(std::move(checks));
    for (const auto& r : records) v.add(r);
    return v.reports();
}

PartitionSummary partition_at_zero(std::span<const PminRecord> records)
{
    PartitionSummary s;
    for (const auto& r : records) {
        if (r.n < 3) continue;
        ++s.total;
        const double b = normalizer(r.n, r.phi);
        const double p = static_cast<double>(r.p);
        if (p > b)
            ++s.large;
        else if (p < b)
            ++s.small;
        else
            ++s.boundary;
    }
    return s;
}

} // namespace leastprime
