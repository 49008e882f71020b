#pragma once

// Closed-form probabilities and count estimators for large and small values
// of P(n). All logarithms are natural.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leastprime/arith.hpp"

namespace leastprime {

// One modulus under the independence heuristic: each of a, a+n, ... up to
// the horizon X = m n ln n is prime with probability about n / (phi ln X).
struct HeuristicParams {
    std::uint64_t n = 0;
    std::uint64_t phi = 0;
    double m = 0;
    double epsilon = 0;
    double c3 = 1;

    // X = m n ln n
    double horizon() const;
    // The multiplier that puts the horizon at (1+eps) phi ln n ln phi.
    static HeuristicParams for_epsilon(std::uint64_t n, std::uint64_t phi, double epsilon, double c3 = 1);
};

// n / (phi ln x), clamped to [0, 1]. x <= 1 is an InvalidArgument.
double prob_single_prime(std::uint64_t n, double x, std::uint64_t phi);
// exp(-m n / phi): chance that P(n, a) exceeds the horizon.
double prob_pna_exceeds(std::uint64_t n, double m, std::uint64_t phi);
// (1 - exp(-m n / phi))^phi: chance that P(n) stays below the horizon.
double prob_pn_below(std::uint64_t n, double m, std::uint64_t phi);
// c3 * (1 / (e^{1 + n/(2 phi)} n))^{(1+eps) / (1 + 2 lnln n / ln n)}, clamped.
double refined_exceedance(std::uint64_t n, double epsilon, std::uint64_t phi, double c3 = 1);

// Li(x) = int_2^x dt / ln t, absolute error below 1e-9.
double log_integral(double x);

// Truncated expansion of ln Y, the log-probability that no a + k n below X is
// prime, to order 1, 2 or 3 in 1 / ln X.
double log_y_estimate(std::uint64_t n, double X, std::uint64_t phi, int order);

enum class LemmaVariant { phi_based, n_based };

struct LemmaBounds {
    double lower;
    double upper;
    double exact;
};

// Bounds on 1 - (1 - q)^phi for q = phi^{-(1+eps)} (phi_based) or
// q = n^{-(1+eps)} (n_based). eps <= 0 is an InvalidArgument.
LemmaBounds lemma_bounds(std::uint64_t n, double epsilon, std::uint64_t phi, LemmaVariant variant);

// Named estimator columns for one (N, eps), in display order.
struct EstimatorRow {
    std::uint64_t N = 0;
    double epsilon = 0;
    std::vector<std::pair<std::string, double>> values;

    // Throws InvalidArgument for an unknown column.
    double at(std::string_view column) const;
};

namespace columns {
inline constexpr std::string_view closed_form = "closed_form";
inline constexpr std::string_view closed_form_over_logN = "closed_form_over_logN";
inline constexpr std::string_view closed_form_times_loglogN = "closed_form_times_loglogN";
inline constexpr std::string_view sum_phi_pow = "sum_phi_pow";
inline constexpr std::string_view sum_k_pow = "sum_k_pow";
inline constexpr std::string_view sum_phi_over_k = "sum_phi_over_k";
inline constexpr std::string_view int_log_loglog = "int_log_loglog";
inline constexpr std::string_view int_log = "int_log";
inline constexpr std::string_view int_loglog = "int_loglog";
} // namespace columns

// (N^{1-eps} - 1) / (1 - eps), equal to ln N at eps = 1.
double closed_form_count(std::uint64_t N, double epsilon);

// Large-outlier estimators: the closed form, its /ln N and *lnln N variants,
// and the sums over 3 <= k <= N of phi(k)^-eps, k^-eps and phi(k) k^{-1-eps}.
// Requires phi.limit() >= N.
EstimatorRow large_estimators(std::uint64_t N, double epsilon, const PhiTable& phi);
// Same, for a whole epsilon grid in one pass over k.
std::vector<EstimatorRow> large_estimators(std::uint64_t N, std::span<const double> epsilons, const PhiTable& phi);

// Lower integration limit for the small-outlier integrals: e^e, where
// lnln k = 1.
double small_estimator_lower_limit();

// Small-outlier estimators: integrals of exp(-k^eps / (ln k lnln k)),
// exp(-k^eps / ln k) and exp(-k^eps / lnln k) over [lower, N], relative
// error <= 1e-6. Non-convergence throws NumericalFailure.
EstimatorRow small_estimators(std::uint64_t N, double epsilon);
EstimatorRow small_estimators(std::uint64_t N, double epsilon, double lower);

} // namespace leastprime
