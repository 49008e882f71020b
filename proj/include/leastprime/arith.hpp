#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "leastprime/errors.hpp"
#include "leastprime/primes.hpp"

namespace leastprime {

struct PrimePower {
    std::uint64_t prime;
    std::uint32_t exponent;
    bool operator==(const PrimePower&) const = default;
};

// Prime factorization, primes strictly increasing. Empty for n = 1.
using Factorization = std::vector<PrimePower>;

std::uint64_t multiply_out(std::span<const PrimePower> factors);

// Euler's totient and smallest prime factor for 1 <= n <= limit, built by a
// linear sieve.
class PhiTable {
public:
    PhiTable() = default;

    std::uint64_t limit() const noexcept { return limit_; }
    std::uint32_t operator[](std::uint64_t n) const noexcept { return phi_[n]; }
    // Throws OutOfRange outside [1, limit].
    std::uint32_t phi(std::uint64_t n) const;
    std::uint32_t smallest_factor(std::uint64_t n) const noexcept { return spf_[n]; }
    std::span<const std::uint32_t> values() const noexcept { return phi_; }

private:
    friend PhiTable build_phi_table(std::uint64_t, std::uint64_t);
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> phi_;
    std::vector<std::uint32_t> spf_;
};

PhiTable build_phi_table(std::uint64_t limit, std::uint64_t memory_budget = kDefaultMemoryBudget);

// Trial division by the table's primes. Requires table.limit()^2 >= the
// cofactor left after removing primes up to table.limit(); throws OutOfRange
// otherwise.
Factorization factorize(std::uint64_t n, const PrimeTable& table);
// Uses the smallest-prime-factor links; n <= phi.limit().
Factorization factorize(std::uint64_t n, const PhiTable& phi);

std::uint64_t totient(std::span<const PrimePower> factors);

// Throws InvalidArgument for gcd(0, 0).
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

} // namespace leastprime
