#pragma once

// Outlier sets, count tables and bound verification over computed P(n).
//
// With B(n) = phi(n) ln n ln phi(n):
//   large outlier at eps:  P(n) > (1+eps) B(n)
//   small outlier at eps:  P(n) < (1-eps) B(n)
// Ranges are half open, x <= n < y.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leastprime/arith.hpp"
#include "leastprime/heuristics.hpp"
#include "leastprime/pmin.hpp"

namespace leastprime {

// phi ln n ln phi; n >= 3.
double normalizer(std::uint64_t n, std::uint64_t phi);
// P(n) / (phi ln n ln phi); n < 3 is an InvalidArgument.
double ratio(const PminRecord& rec);

enum class OutlierKind { large, small };
std::string_view to_string(OutlierKind kind);
OutlierKind parse_outlier_kind(std::string_view name);

bool is_outlier(const PminRecord& rec, double epsilon, OutlierKind kind);

struct OutlierRecord {
    PminRecord record;
    double ratio = 0;
    Factorization factorization;
};

// Streaming form of outlier_set. Records must arrive in increasing n.
class OutlierCollector {
public:
    OutlierCollector(double epsilon, OutlierKind kind, std::uint64_t x, std::uint64_t y, const PrimeTable& table);
    void add(const PminRecord& rec);
    const std::vector<OutlierRecord>& outliers() const noexcept { return out_; }
    std::vector<OutlierRecord> take() { return std::move(out_); }

private:
    double epsilon_;
    OutlierKind kind_;
    std::uint64_t x_, y_;
    const PrimeTable* table_;
    std::uint64_t last_n_ = 0;
    std::vector<OutlierRecord> out_;
};

// Every record in [x, y) that is an outlier of the given kind, sorted by n,
// with ratio and factorization attached (factorized against `table`).
// kind = small requires eps < 1.
std::vector<OutlierRecord> outlier_set(std::span<const PminRecord> records, double epsilon, OutlierKind kind,
                                       std::uint64_t x, std::uint64_t y, const PrimeTable& table);

struct CountRow {
    double epsilon = 0;
    std::uint64_t count = 0;
    EstimatorRow estimators;
    // estimator / count per column; empty when count = 0.
    std::vector<std::pair<std::string, std::optional<double>>> ratios;
};

struct CountTable {
    std::uint64_t N = 0;
    OutlierKind kind = OutlierKind::large;
    std::vector<CountRow> rows;
};

// Counts outliers for a whole epsilon grid in one pass over [3, N).
class OutlierCounter {
public:
    OutlierCounter(OutlierKind kind, std::vector<double> eps_grid, std::uint64_t N);
    void add(const PminRecord& rec);
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    const std::vector<double>& grid() const noexcept { return grid_; }
    OutlierKind kind() const noexcept { return kind_; }
    std::uint64_t N() const noexcept { return N_; }

private:
    OutlierKind kind_;
    std::vector<double> grid_;
    std::uint64_t N_;
    std::vector<std::uint64_t> counts_;
};

// Attaches estimators (large: needs phi.limit() >= N) and ratios to counts.
CountTable finish_count_table(const OutlierCounter& counter, const PhiTable& phi);

CountTable count_table(std::span<const PminRecord> records, OutlierKind kind, std::span<const double> eps_grid,
                       std::uint64_t N, const PhiTable& phi);

// A conjectured bound P(n) < factor B(n) (upper) or P(n) > factor B(n)
// (lower), claimed for every n > threshold.
struct BoundCheck {
    std::string name;
    bool upper = true;
    double factor = 0;
    std::uint64_t threshold = 0;
};

struct BoundReport {
    BoundCheck check;
    std::uint64_t checked = 0; // records with n > threshold
    std::vector<std::uint64_t> violations;
};

// The two conjectured bounds (3 above for n > 3, 0.5 below for n > 570) and
// the bolder variants (2.4 for n > 6, 0.6 for n > 6840, 0.7 for n > 198660).
std::vector<BoundCheck> default_bound_checks();

class BoundVerifier {
public:
    explicit BoundVerifier(std::vector<BoundCheck> checks = default_bound_checks());
    void add(const PminRecord& rec);
    const std::vector<BoundReport>& reports() const noexcept { return reports_; }

private:
    std::vector<BoundReport> reports_;
    std::uint64_t last_n_ = 0;
};

std::vector<BoundReport> verify_bounds(std::span<const PminRecord> records,
                                       std::vector<BoundCheck> checks = default_bound_checks());

// At eps = 0 every n is a large outlier, a small outlier, or exactly on the
// boundary.
struct PartitionSummary {
    std::uint64_t total = 0;
    std::uint64_t large = 0;
    std::uint64_t small = 0;
    std::uint64_t boundary = 0;
    bool complete() const noexcept { return large + small + boundary == total; }
};

PartitionSummary partition_at_zero(std::span<const PminRecord> records);

} // namespace leastprime
