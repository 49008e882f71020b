#include "leastprime/arith.hpp"

#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace leastprime {

std::uint64_t multiply_out(std::span<const PrimePower> factors)
{
    std::uint64_t n = 1;
    for (const auto& f : factors)
        for (std::uint32_t e = 0; e < f.exponent; ++e) n *= f.prime;
    return n;
}

std::uint32_t PhiTable::phi(std::uint64_t n) const
{
    if (n == 0 || n > limit_)
        throw OutOfRange(fmt::format("totient requested for {} outside [1, {}]", n, limit_));
    return phi_[n];
}

PhiTable build_phi_table(std::uint64_t limit, std::uint64_t memory_budget)
{
    if (limit < 1) throw InvalidArgument("totient table limit must be >= 1");
    if (limit >= std::numeric_limits<std::uint32_t>::max())
        throw ResourceLimit(fmt::format("totient table limit {} exceeds 32-bit storage", limit));
    check_memory_budget("totient table", (limit + 1) * 2 * sizeof(std::uint32_t), memory_budget);

    PhiTable t;
    t.limit_ = limit;
    t.phi_.assign(limit + 1, 0);
    t.spf_.assign(limit + 1, 0);
    t.phi_[1] = 1;
    t.spf_[1] = 1;
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            t.phi_[i] = static_cast<std::uint32_t>(i - 1);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t si = t.spf_[i];
        for (std::uint32_t p : primes) {
            const std::uint64_t m = i * p;
            if (p > si || m > limit) break;
            t.spf_[m] = p;
            t.phi_[m] = p == si ? t.phi_[i] * p : t.phi_[i] * (p - 1);
        }
    }
    return t;
}

Factorization factorize(std::uint64_t n, const PrimeTable& table)
{
    if (n == 0) throw InvalidArgument("cannot factor 0");
    Factorization out;
    std::uint64_t m = n;
    table.for_each_prime(2, table.limit() + 1, [&](std::uint64_t p) {
        if (p > m / p) return false;
        if (m % p == 0) {
            std::uint32_t e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            out.push_back({p, e});
        }
        return true;
    });
    if (m > 1) {
        const std::uint64_t lim = table.limit();
        // m is prime only if no factor up to sqrt(m) was skipped.
        if (lim < m / lim && lim * lim < m)
            throw OutOfRange(fmt::format("cannot factor {}: cofactor {} beyond prime table limit {} squared",
                                         n, m, lim));
        out.push_back({m, 1});
    }
    return out;
}

Factorization factorize(std::uint64_t n, const PhiTable& phi)
{
    if (n == 0 || n > phi.limit())
        throw OutOfRange(fmt::format("cannot factor {} with a totient table of limit {}", n, phi.limit()));
    Factorization out;
    while (n > 1) {
        const std::uint32_t p = phi.smallest_factor(n);
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    return out;
}

std::uint64_t totient(std::span<const PrimePower> factors)
{
    std::uint64_t phi = 1;
    for (const auto& f : factors) {
        phi *= f.prime - 1;
        for (std::uint32_t e = 1; e < f.exponent; ++e) phi *= f.prime;
    }
    return phi;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b)
{
    if (a == 0 && b == 0) throw InvalidArgument("gcd(0, 0) is undefined");
    return std::gcd(a, b);
}

} // namespace leastprime
