#pragma once

// Adaptive Simpson quadrature with Richardson correction, templated on the
// working scalar so that tight absolute tolerances can be run in long double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

#include "leastprime/errors.hpp"

namespace leastprime {

template <class Scalar>
struct QuadratureResult {
    Scalar value{};
    Scalar error{};           // sum of the local Richardson error estimates
    std::size_t evaluations = 0;
    bool converged = true;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 48;
    int initial_panels = 16;
};

namespace detail {

template <class Scalar, class F>
struct SimpsonState {
    F& f;
    QuadratureResult<Scalar> result;

    Scalar eval(Scalar x)
    {
        ++result.evaluations;
        return static_cast<Scalar>(f(x));
    }

    void refine(Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb, Scalar whole, Scalar tol, int depth)
    {
        const Scalar m = (a + b) / 2;
        const Scalar lm = (a + m) / 2;
        const Scalar rm = (m + b) / 2;
        const Scalar flm = eval(lm);
        const Scalar frm = eval(rm);
        const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
        const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
        const Scalar delta = left + right - whole;
        if (std::abs(delta) <= 15 * tol || depth <= 0 || !(lm > a && rm < b)) {
            if (std::abs(delta) > 15 * tol) result.converged = false;
            result.value += left + right + delta / 15;
            result.error += std::abs(delta) / 15;
            return;
        }
        refine(a, m, fa, flm, fm, left, tol / 2, depth - 1);
        refine(m, b, fm, frm, fb, right, tol / 2, depth - 1);
    }
};

} // namespace detail

// Integrates f over [a, b]. The target is max(abs_tol, rel_tol * |I|), with
// |I| estimated from a coarse first pass. Throws NumericalFailure carrying the
// achieved error estimate when the target is missed.
template <class Scalar, class F>
QuadratureResult<Scalar> adaptive_simpson(F&& f, Scalar a, Scalar b, const QuadratureOptions& opt = {})
{
    QuadratureResult<Scalar> out;
    if (!(b > a)) return out;

    const int panels = opt.initial_panels > 0 ? opt.initial_panels : 1;
    const Scalar h = (b - a) / panels;
    std::vector<Scalar> xs(2 * panels + 1), fs(2 * panels + 1);
    detail::SimpsonState<Scalar, std::remove_reference_t<F>> state{f, {}};
    for (int i = 0; i <= 2 * panels; ++i) {
        xs[i] = i == 2 * panels ? b : a + h * i / 2;
        fs[i] = state.eval(xs[i]);
    }
    Scalar coarse = 0;
    for (int i = 0; i < panels; ++i)
        coarse += std::abs(h / 6 * (fs[2 * i] + 4 * fs[2 * i + 1] + fs[2 * i + 2]));
    const Scalar target = std::max<Scalar>(static_cast<Scalar>(opt.abs_tol), static_cast<Scalar>(opt.rel_tol) * coarse);

    for (int i = 0; i < panels; ++i) {
        const Scalar whole = h / 6 * (fs[2 * i] + 4 * fs[2 * i + 1] + fs[2 * i + 2]);
        state.refine(xs[2 * i], xs[2 * i + 2], fs[2 * i], fs[2 * i + 1], fs[2 * i + 2], whole, target / panels,
                     opt.max_depth);
    }
    out = state.result;
    if (!out.converged || !std::isfinite(static_cast<double>(out.value)) || out.error > target) {
        throw NumericalFailure("adaptive Simpson quadrature did not converge (achieved error " +
                                   std::to_string(static_cast<double>(out.error)) + ")",
                               static_cast<double>(out.error));
    }
    return out;
}

} // namespace leastprime
