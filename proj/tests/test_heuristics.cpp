#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "leastprime/heuristics.hpp"
#include "leastprime/quadrature.hpp"
#include "oracles.hpp"

using namespace leastprime;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Li(x) = Ei(ln x) - Ei(ln 2), in 50-digit arithmetic.
double li_oracle(double x)
{
    const Big lx = log(Big(x));
    return static_cast<double>(boost::math::expint(lx) - boost::math::expint(log(Big(2))));
}

// Ramanujan's series for li(x), in 50 digits, minus li(2).
double li_series(double x)
{
    auto li = [](Big v) {
        const Big lv = log(v);
        Big sum = 0, term = 1, inner = 0;
        for (int n = 1; n < 400; ++n) {
            term *= lv / n; // (ln v)^n / n!
            if ((n - 1) % 2 == 0) inner += Big(1) / (n); // sum over k <= (n-1)/2 of 1/(2k+1)
            const Big t = ((n % 2) ? 1 : -1) * term / pow(Big(2), n - 1) * inner;
            sum += t;
            if (abs(t) < Big("1e-45") && n > 10) break;
        }
        return boost::math::constants::euler<Big>() + log(lv) + sqrt(v) * sum;
    };
    return static_cast<double>(li(Big(x)) - li(Big(2)));
}

// ln Y by direct summation over k = 1 .. floor(X/n) of ln(1 - n/(phi ln(1+kn))).
double log_y_direct(std::uint64_t n, double X, std::uint64_t phi)
{
    const double r = static_cast<double>(n) / static_cast<double>(phi);
    double s = 0;
    const auto kmax = static_cast<std::uint64_t>(std::floor(X / static_cast<double>(n)));
    for (std::uint64_t k = 1; k <= kmax; ++k) s += std::log1p(-r / std::log(1.0 + static_cast<double>(k * n)));
    return s;
}

} // namespace

TEST_CASE("prob_single_prime")
{
    CHECK(prob_single_prime(2, std::exp(2.0), 1) == doctest::Approx(1.0));
    CHECK(prob_single_prime(2, std::exp(1.0), 1) == 1.0); // clamped from 2
    CHECK(prob_single_prime(3, std::exp(3.0), 2) == doctest::Approx(0.5));
    CHECK(prob_single_prime(10, 100, 4) == doctest::Approx(0.5429).epsilon(1e-4));
    CHECK_THROWS_AS(prob_single_prime(10, 1.0, 4), InvalidArgument);
}

TEST_CASE("prob_pna_exceeds")
{
    CHECK(prob_pna_exceeds(3, 0, 2) == 1.0);
    CHECK(prob_pna_exceeds(3, 1, 2) == doctest::Approx(0.22313016014842982).epsilon(1e-12));
    CHECK(oracle::trial_prime(999983));
    CHECK(std::abs(prob_pna_exceeds(999983, 1, 999982) - std::exp(-1.0)) < 1e-5);
    CHECK_THROWS_AS(prob_pna_exceeds(3, -1, 2), InvalidArgument);
}

TEST_CASE("prob_pn_below")
{
    CHECK(prob_pn_below(10, 0, 4) == 0.0);
    CHECK(prob_pn_below(10, 1e6, 4) == 1.0);
    CHECK(prob_pn_below(10, 2, 4) == doctest::Approx(std::pow(1 - std::exp(-5.0), 4)).epsilon(1e-12));
    CHECK(prob_pn_below(10, 2, 4) == doctest::Approx(0.973319).epsilon(1e-6));
    // large phi: no underflow to exactly 0 for moderate m
    const double v = prob_pn_below(1000003, 20, 1000002);
    CHECK(v > 0.99);
    CHECK(v < 1.0);
}

TEST_CASE("refined_exceedance")
{
    CHECK(refined_exceedance(100, 0, 40, 0) == 0.0);

    const Big n = 100, phi = 40;
    const Big base = 1 / (exp(1 + n / (2 * phi)) * n);
    const Big expo = Big(1) / (1 + 2 * log(log(n)) / log(n));
    const double want = static_cast<double>(pow(base, expo));
    CHECK(refined_exceedance(100, 0, 40, 1) == doctest::Approx(want).epsilon(1e-13));
    CHECK(refined_exceedance(100, 0, 40, 2.5) == doctest::Approx(2.5 * want).epsilon(1e-13));

    double prev = 2;
    for (double e = -0.5; e <= 3.0; e += 0.1) {
        const double v = refined_exceedance(1000, e, 400, 1);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(refined_exceedance(3, 0, 2, 1e9) == 1.0);
    CHECK_THROWS_AS(refined_exceedance(2, 0, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(refined_exceedance(100, -1, 40, 1), InvalidArgument);
}

TEST_CASE("log_integral")
{
    CHECK(log_integral(2) == 0.0);
    CHECK_THROWS_AS(log_integral(1.5), InvalidArgument);

    // the two oracles agree with each other
    CHECK(std::abs(li_oracle(10) - li_series(10)) < 1e-12);
    CHECK(li_oracle(10) == doctest::Approx(5.12044).epsilon(1e-6));

    for (double x : {2.5, 3.0, 10.0, 100.0, 12345.6, 1e5, 1e6}) {
        CAPTURE(x);
        CHECK(std::abs(log_integral(x) - li_oracle(x)) < 1e-9);
    }
    const double li6 = log_integral(1e6);
    CHECK(li6 == doctest::Approx(78626.504).epsilon(1e-7));
    CHECK(std::abs(li6 - 78498) / 78498 < 0.01);
}

TEST_CASE("log_y_estimate")
{
    const std::uint64_t n = 10000, phi = 4000;
    const double X = phi * std::log(10000.0) * std::log(4000.0);
    const double o1 = log_y_estimate(n, X, phi, 1);
    const double o2 = log_y_estimate(n, X, phi, 2);
    const double o3 = log_y_estimate(n, X, phi, 3);
    CHECK(o1 == doctest::Approx(-X / (std::log(X) * phi)));
    CHECK(o3 < o2);
    CHECK(o2 < o1);
    const double direct = log_y_direct(n, X, phi);
    CHECK(std::abs(o3 - direct) / std::abs(direct) < 0.2);

    CHECK_THROWS_AS(log_y_estimate(n, 2.0, phi, 1), InvalidArgument);
    CHECK_THROWS_AS(log_y_estimate(n, X, phi, 0), InvalidArgument);
    CHECK_THROWS_AS(log_y_estimate(n, X, phi, 4), InvalidArgument);
}

TEST_CASE("log_y_estimate order 3 tracks the direct product")
{
    const auto phi = build_phi_table(100000);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::uint64_t> dist(1000, 100000);
    for (int i = 0; i < 100; ++i) {
        const auto n = dist(rng);
        const double f = phi[n];
        const double X = f * std::log(static_cast<double>(n)) * std::log(f);
        const double direct = log_y_direct(n, X, phi[n]);
        CAPTURE(n);
        CHECK(std::abs(log_y_estimate(n, X, phi[n], 3) - direct) / std::abs(direct) < 0.05);
    }
}

TEST_CASE("lemma bounds")
{
    const auto b = lemma_bounds(10, 0.5, 4, LemmaVariant::phi_based);
    using boost::multiprecision::cpp_rational;
    const cpp_rational exact = 1 - cpp_rational(7, 8) * cpp_rational(7, 8) * cpp_rational(7, 8) * cpp_rational(7, 8);
    CHECK(exact == cpp_rational(1695, 4096));
    CHECK(b.lower == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(b.upper == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.exact == doctest::Approx(static_cast<double>(exact)).epsilon(1e-14));

    const auto nb = lemma_bounds(999983, 3.0, 999982, LemmaVariant::n_based);
    CHECK(nb.upper == doctest::Approx(std::pow(999983.0, -3.0) * (1 - 1 / 999983.0)).epsilon(1e-12));

    CHECK_THROWS_AS(lemma_bounds(10, 0, 4, LemmaVariant::phi_based), InvalidArgument);
    CHECK_THROWS_AS(lemma_bounds(10, -0.5, 4, LemmaVariant::n_based), InvalidArgument);
}

TEST_CASE("lemma sweep over a smaller range")
{
    const auto phi = build_phi_table(2000);
    for (std::uint64_t n = 2; n <= 2000; ++n)
        for (int i = 1; i <= 20; ++i) {
            const double e = i / 10.0;
            for (auto v : {LemmaVariant::phi_based, LemmaVariant::n_based}) {
                const auto b = lemma_bounds(n, e, phi[n], v);
                REQUIRE(b.lower <= b.exact);
                // n = 2 (phi = 1) makes the upper bound exact
                REQUIRE(b.exact <= b.upper * (1 + 1e-14));
            }
        }
}

TEST_CASE("m(eps) gives tail probability phi^-(1+eps)")
{
    const auto phi = build_phi_table(100000);
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::uint64_t> nd(3, 100000);
    std::uniform_real_distribution<double> ed(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const auto n = nd(rng);
        const double e = ed(rng);
        const auto p = HeuristicParams::for_epsilon(n, phi[n], e);
        const double want = std::pow(static_cast<double>(phi[n]), -(1 + e));
        CHECK(std::abs(prob_pna_exceeds(n, p.m, phi[n]) - want) / want < 1e-12);
        CHECK(p.horizon() == doctest::Approx((1 + e) * phi[n] * std::log(double(n)) * std::log(double(phi[n]))));
    }
}

TEST_CASE("closed form count")
{
    const std::uint64_t N = 100000000;
    const double logN = std::log(1e8);
    CHECK(closed_form_count(N, 1.0) == logN);
    CHECK(std::abs(closed_form_count(N, 1.0 + 1e-6) - logN) < 1e-4 * logN);
    CHECK(std::abs(closed_form_count(N, 1.0 - 1e-6) - logN) < 1e-4 * logN);
    CHECK(closed_form_count(N, 0.0) == doctest::Approx(99999999.0).epsilon(1e-14));
    CHECK(closed_form_count(N, 1.5) == doctest::Approx((std::pow(1e8, -0.5) - 1) / -0.5).epsilon(1e-14));
}

TEST_CASE("large estimators against direct sums")
{
    const std::uint64_t N = 3000;
    const auto phi = build_phi_table(N);
    for (double e : {0.0, 0.3, 1.0, 1.5}) {
        double s1 = 0, s2 = 0, s3 = 0;
        for (std::uint64_t k = 3; k <= N; ++k) {
            const double f = static_cast<double>(oracle::phi_by_gcd(k));
            s1 += std::pow(f, -e);
            s2 += std::pow(double(k), -e);
            s3 += f / std::pow(double(k), 1 + e);
        }
        const auto row = large_estimators(N, e, phi);
        CHECK(row.at(columns::sum_phi_pow) == doctest::Approx(s1).epsilon(1e-12));
        CHECK(row.at(columns::sum_k_pow) == doctest::Approx(s2).epsilon(1e-12));
        CHECK(row.at(columns::sum_phi_over_k) == doctest::Approx(s3).epsilon(1e-12));
        const double cf = closed_form_count(N, e);
        CHECK(row.at(columns::closed_form) == cf);
        CHECK(row.at(columns::closed_form_over_logN) == doctest::Approx(cf / std::log(double(N))));
        CHECK(row.at(columns::closed_form_times_loglogN) == doctest::Approx(cf * std::log(std::log(double(N)))));
        for (const auto& [name, v] : row.values) CHECK(v >= 0);
    }
    const double grid[] = {0.0, 0.5, 1.0};
    const auto rows = large_estimators(N, grid, phi);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].at(columns::sum_phi_pow) == large_estimators(N, 0.5, phi).at(columns::sum_phi_pow));
    CHECK_THROWS_AS(large_estimators(N + 1, 0.5, phi), OutOfRange);
    CHECK_THROWS_AS(large_estimators(2, 0.5, phi), InvalidArgument);
    CHECK_THROWS_AS(rows[0].at("nope"), InvalidArgument);
}

TEST_CASE("small estimators against Gauss-Kronrod")
{
    const std::uint64_t N = 100000;
    const double lo = small_estimator_lower_limit();
    CHECK(lo == doctest::Approx(15.15426224147926));
    using boost::math::quadrature::gauss_kronrod;
    for (double e : {0.0, 0.2, 0.5}) {
        auto f1 = [e](double k) { return std::exp(-std::pow(k, e) / (std::log(k) * std::log(std::log(k)))); };
        auto f2 = [e](double k) { return std::exp(-std::pow(k, e) / std::log(k)); };
        auto f3 = [e](double k) { return std::exp(-std::pow(k, e) / std::log(std::log(k))); };
        const auto row = small_estimators(N, e);
        CAPTURE(e);
        CHECK(row.at(columns::int_log_loglog) ==
              doctest::Approx(gauss_kronrod<double, 61>::integrate(f1, lo, double(N), 20, 1e-12)).epsilon(1e-6));
        CHECK(row.at(columns::int_log) ==
              doctest::Approx(gauss_kronrod<double, 61>::integrate(f2, lo, double(N), 20, 1e-12)).epsilon(1e-6));
        CHECK(row.at(columns::int_loglog) ==
              doctest::Approx(gauss_kronrod<double, 61>::integrate(f3, lo, double(N), 20, 1e-12)).epsilon(1e-6));
    }
}

TEST_CASE("small estimators decrease in epsilon")
{
    EstimatorRow prev = small_estimators(100000000, 0.0);
    for (int i = 1; i <= 8; ++i) {
        const auto row = small_estimators(100000000, i / 10.0);
        for (std::size_t c = 0; c < row.values.size(); ++c) {
            CHECK(row.values[c].second >= 0);
            CHECK(row.values[c].second < prev.values[c].second);
        }
        prev = row;
    }
    CHECK_THROWS_AS(small_estimators(3, 0.5), InvalidArgument);
    CHECK_THROWS_AS(small_estimators(1000, -0.1), InvalidArgument);
    // range entirely below the lower limit
    CHECK(small_estimators(10, 0.5).at(columns::int_log) == 0.0);
}

TEST_CASE("quadrature failure carries the achieved error")
{
    QuadratureOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 0;
    opt.max_depth = 3;
    try {
        adaptive_simpson<double>([](double x) { return std::sin(1 / x); }, 1e-4, 1.0, opt);
        FAIL("expected NumericalFailure");
    } catch (const NumericalFailure& e) {
        CHECK(e.achieved_error() > 0);
    }
    const auto r = adaptive_simpson<double>([](double x) { return x * x; }, 0.0, 3.0);
    CHECK(r.value == doctest::Approx(9.0).epsilon(1e-14));
}
