#pragma once

// Least primes in arithmetic progressions.
//
// P(n, a) is the least prime congruent to a mod n; P(n) is its maximum over
// the residues a coprime to n. Three interchangeable strategies compute P(n)
// against a shared immutable PrimeTable:
//
//   by-class  search a, a+n, a+2n, ... separately for every admissible a
//   by-scan   walk the primes in order until every class has been hit
//   hybrid    walk the primes until ceil(phi(n)/ln n) classes are left, then
//             search those classes directly
//
// All three return the same PminRecord. A search that runs off the end of the
// table throws TableExhausted; callers extend the table and retry.

#include <cstdint>
#include <optional>
#include <string_view>

#include "leastprime/primes.hpp"

namespace leastprime {

struct PminRecord {
    std::uint64_t n = 0;
    std::uint64_t phi = 0;
    std::uint64_t a = 0; // worst residue: P(n, a) = p
    std::uint64_t p = 0; // P(n)
    bool operator==(const PminRecord&) const = default;
};

enum class Strategy { by_class, by_scan, hybrid, cross_check };

std::string_view to_string(Strategy s);
// Accepts "by-class", "by-scan", "hybrid", "cross-check".
Strategy parse_strategy(std::string_view name);

// When the hybrid strategy stops walking primes.
struct SwitchRule {
    // Overrides the default ceil(phi / ln n) remaining-class threshold.
    std::optional<std::uint64_t> fixed_remaining;

    std::uint64_t threshold(std::uint64_t n, std::uint64_t phi) const;
};

std::uint64_t least_prime_in_class(std::uint64_t n, std::uint64_t a, const PrimeTable& table);

PminRecord pmin_by_class(std::uint64_t n, const PrimeTable& table);
PminRecord pmin_by_scan(std::uint64_t n, const PrimeTable& table);
PminRecord pmin_hybrid(std::uint64_t n, const PrimeTable& table, const SwitchRule& rule = {});

// cross_check runs all three strategies and throws IntegrityFailure naming n
// if they disagree.
PminRecord compute_pmin(std::uint64_t n, const PrimeTable& table, Strategy strategy);

// p prime, p = a (mod n), gcd(a, n) = 1, and no smaller prime in the class.
// Throws IntegrityFailure describing the first failed clause.
void verify_certificate(const PminRecord& rec, const PrimeTable& table);
bool certificate_holds(const PminRecord& rec, const PrimeTable& table) noexcept;

} // namespace leastprime
