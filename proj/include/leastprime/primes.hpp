#pragma once

// Bitset-backed prime table.
//
// Only odd numbers are stored: bit i <-> 2*i + 3. The prime 2 is handled
// separately. At limit 10^9 the table occupies ~60 MB.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <span>
#include <type_traits>
#include <vector>

#include "leastprime/errors.hpp"

namespace leastprime {

struct SieveConfig {
    // Numbers covered by one sieve segment. Rounded up to a multiple of 128.
    std::uint64_t segment_size = std::uint64_t{1} << 20;
    std::uint64_t memory_budget = kDefaultMemoryBudget;
};

class PrimeTable;

// Forward iterator over the primes of a table, ascending.
class PrimeIterator {
public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = std::uint64_t;
    using difference_type = std::ptrdiff_t;
    using pointer = const std::uint64_t*;
    using reference = std::uint64_t;

    PrimeIterator() = default;
    PrimeIterator(const PrimeTable* table, std::uint64_t prime) : table_(table), prime_(prime) {}

    std::uint64_t operator*() const { return prime_; }
    PrimeIterator& operator++();
    PrimeIterator operator++(int)
    {
        auto old = *this;
        ++*this;
        return old;
    }
    bool operator==(const PrimeIterator& other) const { return prime_ == other.prime_; }

private:
    const PrimeTable* table_ = nullptr;
    std::uint64_t prime_ = 0; // 0 marks the end
};

// Primes p with lo <= p <= limit.
class PrimeRange {
public:
    PrimeRange(const PrimeTable* table, std::uint64_t first) : table_(table), first_(first) {}
    PrimeIterator begin() const { return {table_, first_}; }
    PrimeIterator end() const { return {table_, 0}; }

private:
    const PrimeTable* table_;
    std::uint64_t first_;
};

class PrimeTable {
public:
    PrimeTable() = default;

    std::uint64_t limit() const noexcept { return limit_; }
    // pi(limit)
    std::uint64_t count() const noexcept { return count_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::uint64_t memory_bytes() const noexcept { return words_.size() * sizeof(std::uint64_t); }

    // Throws OutOfRange for m > limit().
    bool is_prime(std::uint64_t m) const;

    // No range check; m <= limit() is the caller's obligation.
    bool test(std::uint64_t m) const noexcept
    {
        if ((m & 1) == 0) return m == 2;
        if (m < 3) return false;
        const std::uint64_t i = (m - 3) >> 1;
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    // Smallest prime >= m, or 0 if there is none up to limit().
    std::uint64_t next_prime(std::uint64_t m) const noexcept;

    // Throws OutOfRange for lo > limit().
    PrimeRange primes_from(std::uint64_t lo) const;

    // Calls f(p) for every prime p in [lo, hi) with p <= limit(), ascending.
    // If f returns bool, false stops the walk and for_each_prime returns false.
    template <class F>
    bool for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const;

    bool operator==(const PrimeTable&) const = default;

private:
    friend PrimeTable build_prime_table(std::uint64_t, const SieveConfig&);
    friend PrimeTable load_prime_table(const std::filesystem::path&, std::uint64_t);

    static std::uint64_t bit_count_for(std::uint64_t limit) noexcept
    {
        return limit >= 3 ? (limit - 3) / 2 + 1 : 0;
    }

    std::uint64_t limit_ = 0;
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> words_;
};

// Segmented sieve of Eratosthenes. Working memory beyond the output is one
// segment window plus the base primes up to sqrt(limit).
PrimeTable build_prime_table(std::uint64_t limit, const SieveConfig& config = {});

// ceil(3 N (ln N)^2): enough to hold P(n) for every n < N in practice.
std::uint64_t default_prime_limit(std::uint64_t max_modulus);

// On-disk cache: "LPAP", u32 version, u64 limit, u64 count (little endian),
// then the raw odd-only bitset words.
inline constexpr std::uint32_t kPrimeCacheVersion = 1;
void save_prime_table(const PrimeTable& table, const std::filesystem::path& path);
PrimeTable load_prime_table(const std::filesystem::path& path,
                            std::uint64_t memory_budget = kDefaultMemoryBudget);

template <class F>
bool PrimeTable::for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const
{
    using Result = std::invoke_result_t<F&, std::uint64_t>;
    auto call = [&](std::uint64_t p) -> bool {
        if constexpr (std::is_same_v<Result, bool>) {
            return f(p);
        } else {
            f(p);
            return true;
        }
    };

    if (hi > limit_ + 1) hi = limit_ + 1;
    if (lo >= hi) return true;
    if (lo <= 2 && hi > 2) {
        if (!call(2)) return false;
    }
    if (hi <= 3) return true;
    const std::uint64_t first = lo <= 3 ? 0 : (lo - 2) >> 1;      // index of first odd >= lo
    const std::uint64_t last = (hi - 2) >> 1;                      // one past last odd < hi
    if (first >= last) return true;

    std::uint64_t w = first >> 6;
    const std::uint64_t w_end = (last - 1) >> 6;
    std::uint64_t word = words_[w] & (~std::uint64_t{0} << (first & 63));
    for (;;) {
        if (w == w_end) {
            const unsigned tail = static_cast<unsigned>(last - (w << 6));
            if (tail < 64) word &= (std::uint64_t{1} << tail) - 1;
        }
        while (word != 0) {
            const std::uint64_t i = (w << 6) + static_cast<unsigned>(std::countr_zero(word));
            word &= word - 1;
            if (!call(2 * i + 3)) return false;
        }
        if (w == w_end) break;
        word = words_[++w];
    }
    return true;
}

} // namespace leastprime
