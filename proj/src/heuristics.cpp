#include "leastprime/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "leastprime/quadrature.hpp"

namespace leastprime {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double ln(std::uint64_t v) { return std::log(static_cast<double>(v)); }

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0;
    double carry = 0;
    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

void require_phi(std::uint64_t phi)
{
    if (phi == 0) throw InvalidArgument("phi must be positive");
}

} // namespace

double HeuristicParams::horizon() const { return m * static_cast<double>(n) * ln(n); }

HeuristicParams HeuristicParams::for_epsilon(std::uint64_t n, std::uint64_t phi, double epsilon, double c3)
{
    require_phi(phi);
    const double m = (1 + epsilon) * ln(phi) * static_cast<double>(phi) / static_cast<double>(n);
    return {n, phi, m, epsilon, c3};
}

double prob_single_prime(std::uint64_t n, double x, std::uint64_t phi)
{
    require_phi(phi);
    if (!(x > 1)) throw InvalidArgument(fmt::format("x must exceed 1, got {}", x));
    return clamp01(static_cast<double>(n) / (static_cast<double>(phi) * std::log(x)));
}

double prob_pna_exceeds(std::uint64_t n, double m, std::uint64_t phi)
{
    require_phi(phi);
    if (m < 0) throw InvalidArgument("m must be non-negative");
    return std::exp(-m * static_cast<double>(n) / static_cast<double>(phi));
}

double prob_pn_below(std::uint64_t n, double m, std::uint64_t phi)
{
    const double q = prob_pna_exceeds(n, m, phi);
    return std::exp(static_cast<double>(phi) * std::log1p(-q));
}

double refined_exceedance(std::uint64_t n, double epsilon, std::uint64_t phi, double c3)
{
    require_phi(phi);
    if (n < 3) throw InvalidArgument(fmt::format("refined estimate needs n >= 3, got {}", n));
    if (!(epsilon > -1)) throw InvalidArgument("epsilon must exceed -1");
    if (c3 < 0) throw InvalidArgument("c3 must be non-negative");
    if (c3 == 0) return 0;
    const double logn = ln(n);
    const double log_base = -(1 + static_cast<double>(n) / (2.0 * static_cast<double>(phi))) - logn;
    const double exponent = (1 + epsilon) / (1 + 2 * std::log(logn) / logn);
    return clamp01(c3 * std::exp(exponent * log_base));
}

double log_integral(double x)
{
    if (!(x >= 2)) throw InvalidArgument(fmt::format("Li(x) needs x >= 2, got {}", x));
    if (x == 2) return 0;
    // t = ln u: int e^t / t dt over [ln 2, ln x].
    QuadratureOptions opt;
    opt.abs_tol = 1e-11;
    opt.rel_tol = 0;
    opt.max_depth = 40;
    const auto r = adaptive_simpson<long double>(
        [](long double t) { return std::exp(t) / t; }, std::log(2.0L), std::log(static_cast<long double>(x)), opt);
    return static_cast<double>(r.value);
}

double log_y_estimate(std::uint64_t n, double X, std::uint64_t phi, int order)
{
    require_phi(phi);
    if (!(X > std::numbers::e)) throw InvalidArgument("horizon X must exceed e");
    if (order < 1 || order > 3) throw InvalidArgument(fmt::format("order must be 1, 2 or 3, got {}", order));
    const double L = std::log(X);
    const double r = static_cast<double>(n) / static_cast<double>(phi);
    double series = 1;
    if (order >= 2) series += (1 + r / 2) / L;
    if (order >= 3) series += (1 + r / 2 + r * r / 6) * 2 / (L * L);
    return -X / (L * static_cast<double>(phi)) * series;
}

LemmaBounds lemma_bounds(std::uint64_t n, double epsilon, std::uint64_t phi, LemmaVariant variant)
{
    require_phi(phi);
    if (!(epsilon > 0)) throw InvalidArgument("lemma bounds need epsilon > 0");
    if (n < 2) throw InvalidArgument("lemma bounds need n >= 2");
    const double f = static_cast<double>(phi);
    LemmaBounds b{};
    double q = 0;
    if (variant == LemmaVariant::phi_based) {
        q = std::pow(f, -(1 + epsilon));
        b.upper = std::pow(f, -epsilon);
        b.lower = b.upper - 0.5 * std::pow(f, -2 * epsilon);
    } else {
        const double nn = static_cast<double>(n);
        q = std::pow(nn, -(1 + epsilon));
        b.upper = f / nn * std::pow(nn, -epsilon);
        b.lower = b.upper - 0.5 * std::pow(nn, -2 * epsilon);
    }
    b.exact = phi == 1 ? q : -std::expm1(f * std::log1p(-q));
    return b;
}

double EstimatorRow::at(std::string_view column) const
{
    for (const auto& [name, v] : values)
        if (name == column) return v;
    throw InvalidArgument(fmt::format("no estimator column '{}'", column));
}

double closed_form_count(std::uint64_t N, double epsilon)
{
    const double logN = ln(N);
    const double u = (1 - epsilon) * logN;
    if (u == 0) return logN;
    return logN * std::expm1(u) / u;
}

EstimatorRow large_estimators(std::uint64_t N, double epsilon, const PhiTable& phi)
{
    const double eps[] = {epsilon};
    return large_estimators(N, std::span<const double>(eps), phi).front();
}

std::vector<EstimatorRow> large_estimators(std::uint64_t N, std::span<const double> epsilons, const PhiTable& phi)
{
    if (N < 3) throw InvalidArgument(fmt::format("estimators need N >= 3, got {}", N));
    if (phi.limit() < N)
        throw OutOfRange(fmt::format("totient table limit {} below N = {}", phi.limit(), N));

    const std::size_t m = epsilons.size();
    std::vector<CompensatedSum> s_phi(m), s_k(m), s_ratio(m);
    for (std::uint64_t k = 3; k <= N; ++k) {
        const double fk = phi[k];
        const double lk = std::log(static_cast<double>(k));
        const double lf = std::log(fk);
        const double ratio = fk / static_cast<double>(k);
        for (std::size_t j = 0; j < m; ++j) {
            const double e = epsilons[j];
            const double kp = std::exp(-e * lk);
            s_phi[j].add(std::exp(-e * lf));
            s_k[j].add(kp);
            s_ratio[j].add(ratio * kp);
        }
    }

    const double logN = ln(N);
    std::vector<EstimatorRow> rows;
    rows.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double cf = closed_form_count(N, epsilons[j]);
        EstimatorRow row{N, epsilons[j], {}};
        row.values = {
            {std::string(columns::closed_form), cf},
            {std::string(columns::closed_form_over_logN), cf / logN},
            {std::string(columns::closed_form_times_loglogN), cf * std::log(logN)},
            {std::string(columns::sum_phi_pow), s_phi[j].value()},
            {std::string(columns::sum_k_pow), s_k[j].value()},
            {std::string(columns::sum_phi_over_k), s_ratio[j].value()},
        };
        rows.push_back(std::move(row));
    }
    return rows;
}

double small_estimator_lower_limit() { return std::exp(std::numbers::e); }

EstimatorRow small_estimators(std::uint64_t N, double epsilon)
{
    return small_estimators(N, epsilon, small_estimator_lower_limit());
}

EstimatorRow small_estimators(std::uint64_t N, double epsilon, double lower)
{
    if (N < 4) throw InvalidArgument(fmt::format("small estimators need N >= 4, got {}", N));
    if (!(epsilon >= 0)) throw InvalidArgument("small estimators need epsilon >= 0");
    if (!(lower > std::numbers::e)) throw InvalidArgument("lower integration limit must exceed e");

    const long double t0 = std::log(static_cast<long double>(lower));
    const long double t1 = std::log(static_cast<long double>(N));
    const long double e = epsilon;

    // Substituting k = e^t: int f(k) dk = int f(e^t) e^t dt.
    auto integrate = [&](auto denominator) -> double {
        if (!(t1 > t0)) return 0;
        QuadratureOptions opt;
        opt.abs_tol = 1e-300;
        opt.rel_tol = 1e-9;
        opt.max_depth = 40;
        auto g = [&](long double t) { return std::exp(t - std::exp(e * t) / denominator(t)); };
        return static_cast<double>(adaptive_simpson<long double>(g, t0, t1, opt).value);
    };

    EstimatorRow row{N, epsilon, {}};
    row.values = {
        {std::string(columns::int_log_loglog), integrate([](long double t) { return t * std::log(t); })},
        {std::string(columns::int_log), integrate([](long double t) { return t; })},
        {std::string(columns::int_loglog), integrate([](long double t) { return std::log(t); })},
    };
    return row;
}

} // namespace leastprime
