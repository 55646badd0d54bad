#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace qsd {

namespace detail {

// One 15-point Gauss-Kronrod panel. Boost reports the panel error on the
// reference interval [-1, 1], so it is rescaled here.
template <class F>
double gk_panel(F& f, double a, double b, double& err, double& l1)
{
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err, &l1);
    err *= 0.5 * std::abs(b - a);
    return v;
}

template <class F>
double gk_adaptive(F& f, double a, double b, double v, double e, double tol, unsigned depth, double& err_sum)
{
    if (e <= tol || depth == 0) {
        err_sum += e;
        return v;
    }
    const double mid = 0.5 * (a + b);
    double el = 0, er = 0, l1 = 0;
    const double vl = gk_panel(f, a, mid, el, l1), vr = gk_panel(f, mid, b, er, l1);
    return gk_adaptive(f, a, mid, vl, el, tol / 2, depth - 1, err_sum)
         + gk_adaptive(f, mid, b, vr, er, tol / 2, depth - 1, err_sum);
}

} // namespace detail

// Adaptive Gauss-Kronrod (15-point) integral of a real function on [a, b].
// Throws QuadratureFailure when the error estimate misses max(abs_tol, rel_tol * L1).
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 1e-14)
{
    if (a == b)
        return 0.0;
    double e0 = 0.0, l1 = 0.0;
    const double v0 = detail::gk_panel(f, a, b, e0, l1);
    const double tol = std::max(abs_tol, rel_tol * l1);
    double error = 0.0;
    const double value = detail::gk_adaptive(f, a, b, v0, e0, tol, 20, error);
    if (!std::isfinite(value))
        throw QuadratureFailure("non-finite integrand on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    if (error > std::max(abs_tol, 10 * rel_tol * l1)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "quadrature did not converge on [%.17g, %.17g]: error estimate %.3e, L1 %.3e", a, b,
                      error, l1);
        throw QuadratureFailure(buf);
    }
    return value;
}

} // namespace qsd
