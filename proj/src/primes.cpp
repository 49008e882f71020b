#include "leastprime/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

namespace leastprime {

namespace {

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Odd primes up to `limit` by a plain byte sieve; used for the base primes.
std::vector<std::uint32_t> small_odd_primes(std::uint64_t limit)
{
    std::vector<std::uint32_t> primes;
    if (limit < 3) return primes;
    std::vector<char> composite(limit + 1, 0);
    for (std::uint64_t i = 3; i * i <= limit; i += 2)
        if (!composite[i])
            for (std::uint64_t j = i * i; j <= limit; j += 2 * i) composite[j] = 1;
    for (std::uint64_t i = 3; i <= limit; i += 2)
        if (!composite[i]) primes.push_back(static_cast<std::uint32_t>(i));
    return primes;
}

void put_u32(std::ostream& out, std::uint32_t v)
{
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

void put_u64(std::ostream& out, std::uint64_t v)
{
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

template <class T>
T get_le(std::istream& in)
{
    std::array<unsigned char, sizeof(T)> b{};
    in.read(reinterpret_cast<char*>(b.data()), b.size());
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}

constexpr std::array<char, 4> kMagic = {'L', 'P', 'A', 'P'};

} // namespace

PrimeIterator& PrimeIterator::operator++()
{
    prime_ = prime_ >= table_->limit() ? 0 : table_->next_prime(prime_ + 1);
    return *this;
}

bool PrimeTable::is_prime(std::uint64_t m) const
{
    if (m > limit_)
        throw OutOfRange(fmt::format("{} exceeds the prime table limit {}", m, limit_));
    return test(m);
}

std::uint64_t PrimeTable::next_prime(std::uint64_t m) const noexcept
{
    std::uint64_t found = 0;
    for_each_prime(m, limit_ + 1, [&](std::uint64_t p) {
        found = p;
        return false;
    });
    return found;
}

PrimeRange PrimeTable::primes_from(std::uint64_t lo) const
{
    if (lo > limit_)
        throw OutOfRange(fmt::format("start {} exceeds the prime table limit {}", lo, limit_));
    return {this, next_prime(lo)};
}

PrimeTable build_prime_table(std::uint64_t limit, const SieveConfig& config)
{
    if (limit < 2) throw InvalidArgument(fmt::format("prime table limit must be >= 2, got {}", limit));

    const std::uint64_t nbits = PrimeTable::bit_count_for(limit);
    const std::uint64_t nwords = (nbits + 63) / 64;
    check_memory_budget("prime table", nwords * sizeof(std::uint64_t), config.memory_budget);

    PrimeTable table;
    table.limit_ = limit;
    table.words_.assign(nwords, 0);

    const auto base = small_odd_primes(isqrt(limit));
    // next[k]: bit index of the next odd multiple of base[k] still to cross off.
    std::vector<std::uint64_t> next(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        const std::uint64_t p = base[k];
        next[k] = (p * p - 3) / 2;
    }

    const std::uint64_t seg_words = std::max<std::uint64_t>(1, (config.segment_size + 127) / 128);
    for (std::uint64_t w0 = 0; w0 < nwords; w0 += seg_words) {
        const std::uint64_t w1 = std::min(nwords, w0 + seg_words);
        std::uint64_t* seg = table.words_.data();
        std::fill(seg + w0, seg + w1, ~std::uint64_t{0});
        const std::uint64_t b1 = w1 * 64;
        for (std::size_t k = 0; k < base.size(); ++k) {
            const std::uint64_t p = base[k];
            std::uint64_t j = next[k];
            for (; j < b1; j += p) seg[j >> 6] &= ~(std::uint64_t{1} << (j & 63));
            next[k] = j;
        }
    }
    if (nbits % 64 != 0) table.words_.back() &= (std::uint64_t{1} << (nbits % 64)) - 1;

    std::uint64_t count = 1; // the prime 2
    for (auto w : table.words_) count += static_cast<std::uint64_t>(std::popcount(w));
    table.count_ = count;
    return table;
}

std::uint64_t default_prime_limit(std::uint64_t max_modulus)
{
    if (max_modulus < 3) return 64;
    const double n = static_cast<double>(max_modulus);
    const double l = std::log(n);
    return std::max<std::uint64_t>(64, static_cast<std::uint64_t>(std::ceil(3.0 * n * l * l)));
}

void save_prime_table(const PrimeTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open prime cache for writing", path.string());
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kPrimeCacheVersion);
    put_u64(out, table.limit());
    put_u64(out, table.count());
    for (auto w : table.words()) put_u64(out, w);
    if (!out) throw IoError("failed writing prime cache", path.string());
}

PrimeTable load_prime_table(const std::filesystem::path& path, std::uint64_t memory_budget)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open prime cache", path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw IntegrityFailure(fmt::format("{}: bad prime cache magic", path.string()));
    const auto version = get_le<std::uint32_t>(in);
    if (version != kPrimeCacheVersion)
        throw IntegrityFailure(fmt::format("{}: unsupported prime cache version {}", path.string(), version));
    const auto limit = get_le<std::uint64_t>(in);
    const auto count = get_le<std::uint64_t>(in);
    if (!in || limit < 2) throw IntegrityFailure(fmt::format("{}: truncated prime cache header", path.string()));

    const std::uint64_t nbits = PrimeTable::bit_count_for(limit);
    const std::uint64_t nwords = (nbits + 63) / 64;
    check_memory_budget("prime table", nwords * sizeof(std::uint64_t), memory_budget);

    PrimeTable table;
    table.limit_ = limit;
    table.words_.resize(nwords);
    std::uint64_t popcount = 1;
    for (auto& w : table.words_) {
        w = get_le<std::uint64_t>(in);
        popcount += static_cast<std::uint64_t>(std::popcount(w));
    }
    if (!in) throw IntegrityFailure(fmt::format("{}: truncated prime cache body", path.string()));
    if (nbits % 64 != 0 && (table.words_.back() >> (nbits % 64)) != 0)
        throw IntegrityFailure(fmt::format("{}: bits set beyond the table limit", path.string()));
    if (popcount != count)
        throw IntegrityFailure(
            fmt::format("{}: header count {} disagrees with popcount {}", path.string(), count, popcount));
    table.count_ = count;
    return table;
}

} // namespace leastprime
