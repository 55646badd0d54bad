#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qsd {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 20'000'000;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

inline void validate(const OdeOptions& o)
{
    if (!(o.rel_tol > 0 && o.rel_tol < 0.1) || !(o.abs_tol > 0 && o.abs_tol < 0.1))
        throw InvalidParameter("tolerances must lie in (0, 0.1)");
    if (!(o.max_step > 0))
        throw InvalidParameter("max_step must be positive");
}

namespace detail {
struct NoStepObserver {
    template <class Y>
    void operator()(double, const Y&) const {}
};
} // namespace detail

// Adaptive Dormand-Prince 5(4) with local extrapolation. Steps are clipped so
// that every entry of `times` (ascending, first entry is the initial time) is
// hit exactly; `sample(k, t, y)` is called for each of them, `on_step(t, y)`
// after every accepted step.
template <std::size_t N, class Rhs, class Sample, class OnStep = detail::NoStepObserver>
OdeStats dormand_prince(Rhs&& f, std::array<double, N> y, const std::vector<double>& times, const OdeOptions& opt,
                        Sample&& sample, OnStep&& on_step = {})
{
    using State = std::array<double, N>;
    validate(opt);
    if (times.empty())
        throw InvalidParameter("no sample times");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw InvalidParameter("sample times must be strictly increasing");

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    auto eval = [&](double t, const State& s) {
        ++stats.rhs_evals;
        return f(t, s);
    };
    auto combine = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
        State out = base;
        for (const auto& [c, k] : terms)
            if (c != 0.0)
                for (std::size_t i = 0; i < N; ++i)
                    out[i] += h * c * (*k)[i];
        return out;
    };

    double t = times.front();
    sample(std::size_t{0}, t, y);
    if (times.size() == 1)
        return stats;

    State k1 = eval(t, y);

    // Initial step guess from the scaled norms of y and f.
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
        d0 += (y[i] / sc) * (y[i] / sc);
        d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const double span = times.back() - t;
    h = std::min({std::max(h, 1e-10 * span), opt.max_step, span});

    std::size_t next = 1;
    while (next < times.size()) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw StepSizeUnderflow("step budget exhausted at t = " + std::to_string(t));
        const double target = times[next];
        const bool clipped = t + 1.01 * h >= target && target - t <= opt.max_step;
        const double step = clipped ? target - t : h;
        if (!clipped && step < 1e-14 * std::max(1.0, std::abs(t)))
            throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));

        const State k2 = eval(t + c2 * step, combine(y, step, {{a21, &k1}}));
        const State k3 = eval(t + c3 * step, combine(y, step, {{a31, &k1}, {a32, &k2}}));
        const State k4 = eval(t + c4 * step, combine(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = eval(t + c5 * step, combine(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 =
            eval(t + step, combine(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y1 = combine(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double t1 = clipped ? target : t + step;
        const State k7 = eval(t1, y1);

        double err = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err))
            throw StepSizeUnderflow("non-finite error estimate at t = " + std::to_string(t));

        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            ++stats.accepted;
            t = t1;
            y = y1;
            k1 = k7;
            on_step(t, y);
            if (clipped)
                sample(next++, t, y);
            // keep the natural step length across clipped steps
            h = clipped ? std::max(h, step * factor) : step * factor;
            h = std::min(h, opt.max_step);
        } else {
            ++stats.rejected;
            h = step * std::max(factor, 0.2);
        }
    }
    return stats;
}

} // namespace qsd
