#include <doctest.h>

#include <random>

#include "leastprime/arith.hpp"
#include "oracles.hpp"

using namespace leastprime;

TEST_CASE("phi table small values")
{
    const auto phi = build_phi_table(100);
    CHECK(phi.phi(1) == 1);
    CHECK(phi.phi(7) == 6);
    CHECK(oracle::phi_by_gcd(12) == 4);
    CHECK(phi.phi(12) == 4);
    CHECK_THROWS_AS((void)phi.phi(0), OutOfRange);
    CHECK_THROWS_AS((void)phi.phi(101), OutOfRange);
    CHECK_THROWS_AS(build_phi_table(0), InvalidArgument);
}

TEST_CASE("phi table agrees with a gcd count up to 10^4")
{
    const auto phi = build_phi_table(10000);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        const auto f = phi.phi(n);
        REQUIRE(f == oracle::phi_by_gcd(n));
        if (n >= 2) {
            CHECK(f >= 1);
            CHECK(f <= n - 1);
        }
        if (oracle::trial_prime(n)) CHECK(f == n - 1);
    }
    // multiplicativity on coprime pairs
    for (std::uint64_t a = 1; a <= 100; ++a)
        for (std::uint64_t b = 1; b <= 100; ++b)
            if (std::gcd(a, b) == 1) CHECK(phi[a * b] == phi[a] * phi[b]);
}

TEST_CASE("phi table memory budget")
{
    CHECK_THROWS_AS(build_phi_table(1000000, 1000), ResourceLimit);
}

TEST_CASE("factorize")
{
    const auto t = build_prime_table(40000);
    CHECK(factorize(1, t).empty());
    CHECK(factorize(60, t) == Factorization{{2, 2}, {3, 1}, {5, 1}});
    CHECK(factorize(100000000, t) == Factorization{{2, 8}, {5, 8}});
    CHECK(factorize(999999937, t) == Factorization{{999999937, 1}});
    CHECK_THROWS_AS(factorize(0, t), InvalidArgument);

    // beyond limit^2 with no small factor: cannot decide
    const auto tiny = build_prime_table(10);
    CHECK_THROWS_AS(factorize(143, tiny), OutOfRange);  // 11 * 13
    CHECK(factorize(2 * 3 * 3 * 7, tiny) == Factorization{{2, 1}, {3, 2}, {7, 1}});
    CHECK(factorize(11, tiny) == Factorization{{11, 1}});

    const auto phi = build_phi_table(1000);
    CHECK(factorize(1000, phi) == Factorization{{2, 3}, {5, 3}});
    CHECK(factorize(1, phi).empty());
}

TEST_CASE("factorize reassembles random n <= 10^9")
{
    const auto t = build_prime_table(31623);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1000000000);
    for (int i = 0; i < 1000; ++i) {
        const auto n = dist(rng);
        const auto f = factorize(n, t);
        CHECK(multiply_out(f) == n);
        for (std::size_t j = 0; j < f.size(); ++j) {
            CHECK(oracle::trial_prime(f[j].prime));
            CHECK(f[j].exponent >= 1);
            if (j > 0) CHECK(f[j].prime > f[j - 1].prime);
        }
    }
}

TEST_CASE("totient from factorization")
{
    const auto phi = build_phi_table(5000);
    const auto t = build_prime_table(100);
    for (std::uint64_t n = 1; n <= 5000; ++n) CHECK(totient(factorize(n, t)) == phi[n]);
}

TEST_CASE("gcd")
{
    CHECK(leastprime::gcd(0, 5) == 5);
    CHECK(leastprime::gcd(12, 18) == 6);
    CHECK(leastprime::gcd(35, 64) == 1);
    CHECK_THROWS_AS(leastprime::gcd(0, 0), InvalidArgument);
}
