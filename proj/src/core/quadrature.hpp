#pragma once
#include <cmath>
#include <complex>

#include "core/errors.hpp"

namespace stochham {

struct QuadStats {
    double err_estimate = 0.0;
    long evals = 0;
    bool converged = true;
};

namespace detail {

template <class T> inline double quad_abs(const T& v) { return std::abs(v); }

template <class F, class T>
T adaptive_simpson_rec(const F& f, double a, double b, T fa, T fm, T fb, T whole, double tol,
                       int depth, QuadStats& st) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    T flm = f(lm);
    T frm = f(rm);
    st.evals += 2;
    T left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
    T right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
    T delta = left + right - whole;
    if (depth <= 0) {
        st.converged = false;
        st.err_estimate += quad_abs(delta);
        return left + right + delta / 15.0;
    }
    if (quad_abs(delta) <= 15.0 * tol) {
        st.err_estimate += quad_abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st);
}

} // namespace detail

// Adaptive Simpson quadrature with Richardson correction. Works for real and
// complex integrands; tol is an absolute tolerance on the whole interval.
template <class F>
auto adaptive_simpson(const F& f, double a, double b, double tol, QuadStats* stats = nullptr,
                      int max_depth = 48) -> decltype(f(a)) {
    using T = decltype(f(a));
    if (!(tol > 0.0)) throw SpecError("quadrature tolerance must be positive");
    if (a == b) return T{};
    QuadStats local;
    QuadStats& st = stats ? *stats : local;
    st = QuadStats{};
    T fa = f(a);
    T fb = f(b);
    T fm = f(0.5 * (a + b));
    st.evals = 3;
    T whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    T result = detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, st);
    if (!st.converged && !stats)
        throw NumericError("adaptive quadrature failed to converge; residual estimate " +
                           std::to_string(st.err_estimate));
    return result;
}

} // namespace stochham
