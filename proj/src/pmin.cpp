#include "leastprime/pmin.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <span>
#include <numeric>
#include <vector>

#include <fmt/format.h>

namespace leastprime {

namespace {

void check_modulus(std::uint64_t n)
{
    if (n < 3) throw InvalidArgument(fmt::format("modulus must be >= 3, got {}", n));
}

[[noreturn]] void exhausted(std::uint64_t n, std::uint64_t needed, const PrimeTable& table)
{
    throw TableExhausted(
        fmt::format("P({}) search needs {} beyond prime table limit {}", n, needed, table.limit()), needed);
}

// 1 marks residues that share a factor with n; phi(n) zeros remain.
struct ResidueMask {
    std::vector<std::uint8_t> seen;
    std::uint64_t phi;
};

ResidueMask coprime_mask(std::uint64_t n)
{
    ResidueMask mask{std::vector<std::uint8_t>(n, 0), n};
    mask.seen[0] = 1;
    std::uint64_t m = n;
    auto strike = [&](std::uint64_t q) {
        for (std::uint64_t r = q; r < n; r += q) mask.seen[r] = 1;
        mask.phi = mask.phi / q * (q - 1);
        while (m % q == 0) m /= q;
    };
    if (m % 2 == 0) strike(2);
    for (std::uint64_t q = 3; q <= m / q; q += 2)
        if (m % q == 0) strike(q);
    if (m > 1) strike(m);
    return mask;
}

} // namespace

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::by_class: return "by-class";
    case Strategy::by_scan: return "by-scan";
    case Strategy::hybrid: return "hybrid";
    case Strategy::cross_check: return "cross-check";
    }
    return "?";
}

Strategy parse_strategy(std::string_view name)
{
    for (auto s : {Strategy::by_class, Strategy::by_scan, Strategy::hybrid, Strategy::cross_check})
        if (to_string(s) == name) return s;
    throw InvalidArgument(fmt::format("unknown strategy '{}'", name));
}

std::uint64_t SwitchRule::threshold(std::uint64_t n, std::uint64_t phi) const
{
    if (fixed_remaining) return *fixed_remaining;
    return static_cast<std::uint64_t>(std::ceil(static_cast<double>(phi) / std::log(static_cast<double>(n))));
}

std::uint64_t least_prime_in_class(std::uint64_t n, std::uint64_t a, const PrimeTable& table)
{
    check_modulus(n);
    if (a == 0 || a >= n) throw InvalidArgument(fmt::format("residue {} not in [1, {})", a, n));
    if (std::gcd(a, n) != 1) throw InvalidResidue(fmt::format("gcd({}, {}) != 1", a, n));
    for (std::uint64_t c = a;; c += n) {
        if (c > table.limit()) exhausted(n, c, table);
        if (table.test(c)) return c;
    }
}

PminRecord pmin_by_class(std::uint64_t n, const PrimeTable& table)
{
    check_modulus(n);
    PminRecord rec{n, 0, 0, 0};
    for (std::uint64_t a = 1; a < n; ++a) {
        if (std::gcd(a, n) != 1) continue;
        ++rec.phi;
        const std::uint64_t p = least_prime_in_class(n, a, table);
        if (p > rec.p) {
            rec.p = p;
            rec.a = a;
        }
    }
    return rec;
}

PminRecord pmin_by_scan(std::uint64_t n, const PrimeTable& table)
{
    check_modulus(n);
    auto mask = coprime_mask(n);
    std::uint64_t remaining = mask.phi;
    std::uint64_t last = 0;
    for (std::uint64_t p : table.primes_from(2)) {
        const std::uint64_t r = p % n;
        if (mask.seen[r]) continue;
        mask.seen[r] = 1;
        if (--remaining == 0) {
            last = p;
            break;
        }
    }
    if (remaining != 0) exhausted(n, table.limit() + 1, table);
    return {n, mask.phi, last % n, last};
}

namespace {

// Residues coprime to n split by parity: bit j of plane[pi] is residue
// 2j + pi. With the table storing odd numbers only, the odd members of a
// window [k n, (k+1) n) line up with one plane as a contiguous bit run.
struct ParityPlanes {
    std::array<std::vector<std::uint64_t>, 2> plane;
    std::array<std::uint64_t, 2> len{};
};

std::vector<std::uint64_t> odd_prime_factors(std::uint64_t n)
{
    std::vector<std::uint64_t> f;
    while (n % 2 == 0) n /= 2;
    for (std::uint64_t q = 3; q <= n / q; q += 2)
        if (n % q == 0) {
            f.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) f.push_back(n);
    return f;
}

ParityPlanes coprime_planes(std::uint64_t n, const std::vector<std::uint64_t>& odd_factors)
{
    ParityPlanes pp;
    for (unsigned pi = 0; pi < 2; ++pi) {
        if (pi == 0 && n % 2 == 0) continue; // even residues share the factor 2
        const std::uint64_t len = (n - pi + 1) / 2;
        auto& bits = pp.plane[pi];
        pp.len[pi] = len;
        bits.assign((len + 63) / 64, ~std::uint64_t{0});
        if (len % 64) bits.back() = (std::uint64_t{1} << (len % 64)) - 1;
        if (pi == 0) bits[0] &= ~std::uint64_t{1}; // residue 0

        for (std::uint64_t q : odd_factors) {
            // odd multiples of q sit at j = (q-1)/2 + t q, even ones at j = t q
            const std::uint64_t j0 = pi == 0 ? 0 : (q - 1) / 2;
            if (q >= 64) {
                for (std::uint64_t j = j0; j < len; j += q) bits[j >> 6] &= ~(std::uint64_t{1} << (j & 63));
                continue;
            }
            // the strike pattern repeats every q words
            std::uint64_t pattern[64];
            for (std::uint64_t w = 0; w < q; ++w) {
                std::uint64_t m = 0;
                for (std::uint64_t b = (j0 + q - (64 * w) % q) % q; b < 64; b += q) m |= std::uint64_t{1} << b;
                pattern[w] = ~m;
            }
            for (std::size_t w = 0, r = 0; w < bits.size(); ++w) {
                bits[w] &= pattern[r];
                if (++r == q) r = 0;
            }
        }
    }
    return pp;
}

// 64 table bits starting at bit `at`; bits past the end read as 0.
inline std::uint64_t table_bits(std::span<const std::uint64_t> words, std::uint64_t at)
{
    const std::uint64_t i = at >> 6, s = at & 63;
    const std::uint64_t lo = i < words.size() ? words[i] : 0;
    if (s == 0) return lo;
    const std::uint64_t hi = i + 1 < words.size() ? words[i + 1] : 0;
    return (lo >> s) | (hi << (64 - s));
}

} // namespace

PminRecord pmin_hybrid(std::uint64_t n, const PrimeTable& table, const SwitchRule& rule)
{
    check_modulus(n);
    const auto factors = odd_prime_factors(n);
    auto pp = coprime_planes(n, factors);
    std::uint64_t phi = n;
    if (n % 2 == 0) phi /= 2;
    for (std::uint64_t q : factors) phi = phi / q * (q - 1);

    const std::uint64_t stop_at = rule.threshold(n, phi);
    std::uint64_t remaining = phi;
    PminRecord rec{n, phi, 0, 0};
    const std::uint64_t limit = table.limit();
    const auto words = table.words();

    // Scan the primes one window [k n, (k+1) n) at a time, clearing the
    // classes they hit with word operations.
    std::uint64_t scanned_to = 0; // every prime <= scanned_to has been seen
    if (remaining > stop_at) {
        // window 0: primes below n are their own residues
        table.for_each_prime(2, std::min(n, limit + 1), [&](std::uint64_t p) {
            auto& plane = pp.plane[p & 1];
            if (plane.empty()) return; // 2 when n is even
            auto& w = plane[p >> 7];
            const std::uint64_t bit = std::uint64_t{1} << ((p >> 1) & 63);
            if (w & bit) {
                w &= ~bit;
                --remaining;
                rec.p = p;
            }
        });
        if (n - 1 > limit) exhausted(n, limit + 1, table);
        scanned_to = n - 1;

        // word indices of each plane that still hold unseen classes
        std::array<std::vector<std::uint32_t>, 2> active;
        for (unsigned pi = 0; pi < 2; ++pi)
            for (std::uint32_t w = 0; w < pp.plane[pi].size(); ++w)
                if (pp.plane[pi][w]) active[pi].push_back(w);

        for (std::uint64_t base = n; remaining > stop_at; base += n) {
            if (base > limit) exhausted(n, base, table);
            // the odd numbers of the window belong to residues of the other parity
            const unsigned pi = (base & 1) ? 0 : 1;
            auto& bits = pp.plane[pi];
            auto& act = active[pi];
            const std::uint64_t off = (base + pi - 3) / 2;
            // in the window that crosses the table limit, only j <= jmax is valid
            const bool partial = base + n - 1 > limit;
            const std::uint64_t jmax = partial ? (limit >= base + pi ? (limit - base - pi) / 2 : 0) : 0;
            const bool none_valid = partial && limit < base + pi;

            std::size_t keep = 0;
            for (std::size_t i = 0; i < act.size(); ++i) {
                const std::uint32_t w = act[i];
                std::uint64_t hit = bits[w] & table_bits(words, off + 64 * std::uint64_t{w});
                if (partial) {
                    const std::uint64_t first = 64 * std::uint64_t{w};
                    if (none_valid || first > jmax) hit = 0;
                    else if (jmax - first < 63) hit &= (std::uint64_t{2} << (jmax - first)) - 1;
                }
                if (hit) {
                    bits[w] &= ~hit;
                    remaining -= static_cast<std::uint64_t>(std::popcount(hit));
                    rec.p = base + 2 * (64 * std::uint64_t{w} + 63 - std::countl_zero(hit)) + pi;
                }
                if (bits[w]) act[keep++] = w;
            }
            act.resize(keep);
            scanned_to = partial ? limit : base + n - 1;
            if (partial && remaining > stop_at) exhausted(n, limit + 1, table);
        }
    }
    if (remaining == 0) {
        rec.a = rec.p % n;
        return rec;
    }

    // Per-class search for what is left, interleaved across classes so that
    // each pass touches one window [k n, (k+1) n) of the table.
    std::vector<std::uint64_t> open;
    open.reserve(remaining);
    for (unsigned pi = 0; pi < 2; ++pi)
        for (std::size_t w = 0; w < pp.plane[pi].size(); ++w)
            for (std::uint64_t m = pp.plane[pi][w]; m; m &= m - 1)
                open.push_back(2 * (64 * w + static_cast<std::uint64_t>(std::countr_zero(m))) + pi);

    std::uint64_t base = scanned_to / n * n;
    if (base + n - 1 > scanned_to) {
        // first window is partly scanned already
        for (std::size_t i = 0; i < open.size();) {
            const std::uint64_t c = base + open[i];
            if (c > scanned_to && c <= limit && table.test(c)) {
                rec.p = std::max(rec.p, c);
                open[i] = open.back();
                open.pop_back();
            } else {
                ++i;
            }
        }
        if (!open.empty() && base + n - 1 > limit) exhausted(n, limit + 1, table);
    }
    for (base += n; !open.empty(); base += n) {
        if (base + n - 1 > limit) {
            for (std::uint64_t r : open)
                if (base + r > limit) exhausted(n, base + r, table);
        }
        // branch-free compaction: classes that hit a prime drop out
        std::size_t keep = 0;
        std::uint64_t best = rec.p;
        for (std::uint64_t r : open) {
            const std::uint64_t c = base + r;
            const bool hit = table.test(c);
            open[keep] = r;
            keep += !hit;
            best = hit && c > best ? c : best;
        }
        open.resize(keep);
        rec.p = best;
    }
    rec.a = rec.p % n;
    return rec;
}

PminRecord compute_pmin(std::uint64_t n, const PrimeTable& table, Strategy strategy)
{
    switch (strategy) {
    case Strategy::by_class: return pmin_by_class(n, table);
    case Strategy::by_scan: return pmin_by_scan(n, table);
    case Strategy::hybrid: return pmin_hybrid(n, table);
    case Strategy::cross_check: {
        const auto h = pmin_hybrid(n, table);
        const auto s = pmin_by_scan(n, table);
        const auto c = pmin_by_class(n, table);
        if (!(h == s && s == c))
            throw IntegrityFailure(fmt::format(
                "strategies disagree at n={}: hybrid (a={}, p={}), by-scan (a={}, p={}), by-class (a={}, p={})", n,
                h.a, h.p, s.a, s.p, c.a, c.p));
        return h;
    }
    }
    throw InvalidArgument("unknown strategy");
}

void verify_certificate(const PminRecord& rec, const PrimeTable& table)
{
    auto fail = [&](std::string_view why) {
        throw IntegrityFailure(
            fmt::format("certificate failed for n={} a={} p={}: {}", rec.n, rec.a, rec.p, why));
    };
    if (rec.n < 3) fail("modulus below 3");
    if (rec.a == 0 || rec.a >= rec.n) fail("residue out of range");
    if (std::gcd(rec.a, rec.n) != 1) fail("residue not coprime to n");
    if (rec.p % rec.n != rec.a) fail("p not congruent to a");
    if (rec.p > table.limit()) fail("p beyond prime table");
    if (!table.test(rec.p)) fail("p not prime");
    for (std::uint64_t c = rec.a; c < rec.p; c += rec.n)
        if (table.test(c)) fail(fmt::format("smaller prime {} in the class", c));
}

bool certificate_holds(const PminRecord& rec, const PrimeTable& table) noexcept
{
    try {
        verify_certificate(rec, table);
        return true;
    } catch (const IntegrityFailure&) {
        return false;
    }
}

} // namespace leastprime
