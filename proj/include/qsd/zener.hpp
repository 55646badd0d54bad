#pragma once

#include <numbers>
#include <vector>

#include "core.hpp"
#include "ode.hpp"
#include "trace.hpp"

// Linear-sweep amplitude equation  c1'' + i alpha t c1' + f^2 c1 = 0.
namespace qsd::zener {

struct ZenerProblem {
    double alpha = 1.0;
    double f_sq = 1.0;
    cplx c1_0 = 1.0;
    cplx c1_dot_0 = 0.0;
    double t0 = 0.0;

    void validate() const
    {
        require_finite(alpha, "alpha");
        if (!(require_finite(f_sq, "f_sq") >= 0))
            throw InvalidParameter("f^2 must be non-negative");
        require_finite(c1_0, "c1(0)");
        require_finite(c1_dot_0, "c1'(0)");
        require_finite(t0, "t0");
    }
};

// u1 = exp(i alpha t^2 / 4) c1 solves u1'' + (n + 1/2 - z^2 / 4) u1 = 0 in z = z_coefficient * t.
struct WeberTransform {
    cplx n;
    cplx z_coefficient;

    cplx z(double t) const { return z_coefficient * t; }
};

inline WeberTransform weber_transform(const ZenerProblem& p)
{
    p.validate();
    if (p.alpha == 0.0)
        throw ZeroSweepRate("Weber mapping needs a nonzero sweep rate");
    return {I * p.f_sq / p.alpha, std::sqrt(cplx(p.alpha)) * std::polar(1.0, -std::numbers::pi / 4)};
}

inline cplx weber_phase(double alpha, double t) { return std::polar(1.0, alpha * t * t / 4); }

struct ZenerSolution {
    std::vector<double> times;
    std::vector<cplx> c1, c1_dot;
    OdeStats stats;

    // |c1|^2, |c1'|^2 / f^2 and the drift of their sum; requires f^2 > 0.
    TransitionTrace trace(double f_sq) const
    {
        if (!(f_sq > 0))
            throw InvalidParameter("trace needs f^2 > 0");
        TransitionTrace out;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double a = std::norm(c1[k]), b = std::norm(c1_dot[k]) / f_sq;
            out.push_back(times[k], a, b, a + b - 1);
        }
        return out;
    }
};

namespace detail {

using State = std::array<double, 4>;

template <class Accel>
ZenerSolution integrate_second_order(Accel&& accel, cplx y0, cplx dy0, const std::vector<double>& times,
                                     const OdeOptions& opt)
{
    ZenerSolution s;
    auto rhs = [&](double t, const State& y) {
        const cplx a = accel(t, cplx(y[0], y[1]), cplx(y[2], y[3]));
        return State{y[2], y[3], a.real(), a.imag()};
    };
    s.stats = dormand_prince<4>(rhs, State{y0.real(), y0.imag(), dy0.real(), dy0.imag()}, times, opt,
                                [&](std::size_t, double t, const State& y) {
                                    s.times.push_back(t);
                                    s.c1.emplace_back(y[0], y[1]);
                                    s.c1_dot.emplace_back(y[2], y[3]);
                                });
    return s;
}

} // namespace detail

inline ZenerSolution solve_zener(const ZenerProblem& p, const std::vector<double>& times,
                                 const OdeOptions& opt = {1e-12, 1e-14})
{
    p.validate();
    if (times.empty() || times.front() != p.t0)
        throw InvalidParameter("sample times must start at t0");
    return detail::integrate_second_order(
        [&](double t, cplx c, cplx dc) { return -I * p.alpha * t * dc - p.f_sq * c; }, p.c1_0, p.c1_dot_0, times,
        opt);
}

// Integrates u1'' = -(f^2 - i alpha / 2 + alpha^2 t^2 / 4) u1 from the transformed initial data.
inline ZenerSolution solve_weber_form(const ZenerProblem& p, const std::vector<double>& times,
                                      const OdeOptions& opt = {1e-12, 1e-14})
{
    p.validate();
    if (times.empty() || times.front() != p.t0)
        throw InvalidParameter("sample times must start at t0");
    const cplx ph = weber_phase(p.alpha, p.t0);
    const cplx u0 = ph * p.c1_0;
    const cplx du0 = ph * (p.c1_dot_0 + 0.5 * I * p.alpha * p.t0 * p.c1_0);
    return detail::integrate_second_order(
        [&](double t, cplx u, cplx) { return -(p.f_sq - 0.5 * I * p.alpha + 0.25 * p.alpha * p.alpha * t * t) * u; },
        u0, du0, times, opt);
}

struct ResidualReport {
    ZenerSolution solution;      // samples at the requested times
    double max_residual = 0.0;   // original equation
    double max_weber_residual = 0.0;
    double max_round_trip = 0.0; // |exp(-i alpha t^2 / 4) u1 - c1| with u1 from the Weber-form solve
};

// Residuals by fourth-order central differences of the first derivative with
// spacing h, at every requested time whose stencil lies inside the sample range.
inline ResidualReport zener_residual(const ZenerProblem& p, const std::vector<double>& times, double h = 1e-3,
                                     const OdeOptions& opt = {1e-12, 1e-14})
{
    if (!(h > 0))
        throw InvalidParameter("stencil spacing must be positive");
    std::vector<double> grid;
    std::vector<std::size_t> index_of(times.size()), stencil_at;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const bool fits = k > 0 && t - 2 * h > times.front() && t + 2 * h < times.back();
        if (fits) {
            stencil_at.push_back(k);
            for (int j = -2; j < 0; ++j)
                grid.push_back(t + j * h);
        }
        index_of[k] = grid.size();
        grid.push_back(t);
        if (fits)
            for (int j = 1; j <= 2; ++j)
                grid.push_back(t + j * h);
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidParameter("sample times too close for the residual stencil");

    const ZenerSolution c = solve_zener(p, grid, opt);
    const ZenerSolution u = solve_weber_form(p, grid, opt);

    ResidualReport r;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const std::size_t i = index_of[k];
        r.solution.times.push_back(c.times[i]);
        r.solution.c1.push_back(c.c1[i]);
        r.solution.c1_dot.push_back(c.c1_dot[i]);
        r.max_round_trip =
            std::max(r.max_round_trip, std::abs(std::conj(weber_phase(p.alpha, grid[i])) * u.c1[i] - c.c1[i]));
    }
    r.solution.stats = c.stats;

    // u1 and u1' reconstructed from the original-equation solution
    auto u_of = [&](std::size_t i) { return weber_phase(p.alpha, grid[i]) * c.c1[i]; };
    auto du_of = [&](std::size_t i) {
        return weber_phase(p.alpha, grid[i]) * (c.c1_dot[i] + 0.5 * I * p.alpha * grid[i] * c.c1[i]);
    };
    auto fd = [&](auto&& g, std::size_t i) {
        return (g(i - 2) - 8.0 * g(i - 1) + 8.0 * g(i + 1) - g(i + 2)) / (12 * h);
    };
    for (std::size_t k : stencil_at) {
        const std::size_t i = index_of[k];
        const double t = grid[i];
        const cplx c2 = fd([&](std::size_t j) { return c.c1_dot[j]; }, i);
        r.max_residual = std::max(r.max_residual, std::abs(c2 + I * p.alpha * t * c.c1_dot[i] + p.f_sq * c.c1[i]));
        const cplx u2 = fd(du_of, i);
        const cplx coeff = p.f_sq - 0.5 * I * p.alpha + 0.25 * p.alpha * p.alpha * t * t;
        r.max_weber_residual = std::max(r.max_weber_residual, std::abs(u2 + coeff * u_of(i)));
    }
    return r;
}

} // namespace qsd::zener
