#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace qsd {

// Real scalar function of time with first derivative and definite integral.
class TimeFunction {
public:
    struct Constant {
        double value;
    };
    // amplitude * exp(rate * t)
    struct Exponential {
        double amplitude, rate;
    };
    struct Linear {
        double intercept, slope;
    };
    // Clamped cubic spline stored in Hermite form (node values and slopes).
    struct Tabulated {
        std::vector<double> t, y, m, cumulative;
    };
    // Built-in profiles:
    //   sin, cos   {A, w, phase}  A sin(w t + phase)
    //   sech2      {A, k}         A sech(k t)^2
    //   tanh       {A, k}         A tanh(k t)
    //   gaussian   {A, t0, sigma}
    //   roland_cerf {x, epsilon}  local-adiabatic schedule s(t)
    struct Composed {
        std::string profile;
        std::vector<double> params;
    };
    struct Callable {
        std::function<double(double)> f, df;
    };

    using Kind = std::variant<Constant, Exponential, Linear, std::shared_ptr<const Tabulated>, Composed, Callable>;

    static constexpr double inf = std::numeric_limits<double>::infinity();

    TimeFunction() : TimeFunction(constant(0.0)) {}

    static TimeFunction constant(double v) { return TimeFunction(Constant{require_finite(v, "constant")}); }

    static TimeFunction exponential(double amplitude, double rate)
    {
        return TimeFunction(Exponential{require_finite(amplitude, "amplitude"), require_finite(rate, "rate")});
    }

    static TimeFunction linear(double intercept, double slope)
    {
        return TimeFunction(Linear{require_finite(intercept, "intercept"), require_finite(slope, "slope")});
    }

    // End slopes default to second-order one-sided differences.
    static TimeFunction tabulated(std::vector<double> t, std::vector<double> y,
                                  std::optional<double> slope0 = {}, std::optional<double> slope1 = {});

    static TimeFunction composed(std::string profile, std::vector<double> params);

    static TimeFunction callable(std::function<double(double)> f, std::function<double(double)> df,
                                 double t0 = -inf, double t1 = inf)
    {
        if (!f || !df)
            throw InvalidParameter("callable time function needs value and derivative");
        TimeFunction out(Callable{std::move(f), std::move(df)});
        out.set_domain(t0, t1);
        return out;
    }

    double operator()(double t) const;
    double derivative(double t) const;
    double integral(double a, double b) const;

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    bool contains(double t) const { return t >= t0_ && t <= t1_; }
    const Kind& kind() const { return kind_; }
    bool is_tabulated() const { return std::holds_alternative<std::shared_ptr<const Tabulated>>(kind_); }

private:
    explicit TimeFunction(Kind k) : kind_(std::move(k)) {}

    void set_domain(double t0, double t1)
    {
        if (std::isnan(t0) || std::isnan(t1) || !(t0 < t1))
            throw InvalidParameter("time function domain must satisfy t0 < t1");
        t0_ = t0;
        t1_ = t1;
    }

    void check(double t) const
    {
        if (!contains(t))
            throw OutOfDomain("t = " + std::to_string(t) + " outside [" + std::to_string(t0_) + ", "
                              + std::to_string(t1_) + "]");
    }

    Kind kind_;
    double t0_ = -inf, t1_ = inf;
};

namespace detail {

struct ComposedEval {
    double value, slope;
};

inline std::size_t composed_arity(const std::string& p)
{
    if (p == "sin" || p == "cos" || p == "gaussian")
        return 3;
    if (p == "sech2" || p == "tanh" || p == "roland_cerf")
        return 2;
    throw InvalidParameter("unknown profile '" + p + "'");
}

inline double roland_cerf_run_time(double x, double epsilon)
{
    const double q = std::sqrt(1 - x * x);
    return std::atan(q / x) / (epsilon * x * q);
}

inline ComposedEval composed_eval(const TimeFunction::Composed& c, double t)
{
    const auto& p = c.params;
    if (c.profile == "sin")
        return {p[0] * std::sin(p[1] * t + p[2]), p[0] * p[1] * std::cos(p[1] * t + p[2])};
    if (c.profile == "cos")
        return {p[0] * std::cos(p[1] * t + p[2]), -p[0] * p[1] * std::sin(p[1] * t + p[2])};
    if (c.profile == "sech2") {
        const double s = 1 / std::cosh(p[1] * t);
        return {p[0] * s * s, -2 * p[0] * p[1] * s * s * std::tanh(p[1] * t)};
    }
    if (c.profile == "tanh") {
        const double th = std::tanh(p[1] * t);
        return {p[0] * th, p[0] * p[1] * (1 - th * th)};
    }
    if (c.profile == "gaussian") {
        const double u = (t - p[1]) / p[2];
        const double g = p[0] * std::exp(-0.5 * u * u);
        return {g, -g * u / p[2]};
    }
    // roland_cerf
    const double x = p[0], eps = p[1], q = std::sqrt(1 - x * x);
    const double arg = 2 * eps * x * q * t - std::atan(q / x);
    const double sec = 1 / std::cos(arg);
    return {0.5 + 0.5 * (x / q) * std::tan(arg), eps * x * x * sec * sec};
}

} // namespace detail

inline TimeFunction TimeFunction::tabulated(std::vector<double> t, std::vector<double> y,
                                            std::optional<double> slope0, std::optional<double> slope1)
{
    const std::size_t n = t.size();
    if (n < 2 || y.size() != n)
        throw InvalidParameter("tabulated function needs at least two (t, y) samples of equal length");
    for (std::size_t i = 0; i < n; ++i) {
        require_finite(t[i], "sample time");
        require_finite(y[i], "sample value");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw InvalidParameter("tabulated sample times must be strictly increasing");
    }

    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t[i + 1] - t[i];
        d[i] = (y[i + 1] - y[i]) / h[i];
    }
    auto end_slope = [&](std::size_t i0, int dir) {
        if (n == 2)
            return d[0];
        // Second-order one-sided difference through three nodes.
        const std::size_t a = i0, b = i0 + dir, c = i0 + 2 * dir;
        const double h1 = t[b] - t[a], h2 = t[c] - t[b];
        const double s1 = (y[b] - y[a]) / h1, s2 = (y[c] - y[b]) / h2;
        return s1 + (s1 - s2) * h1 / (h1 + h2);
    };
    std::vector<double> m(n);
    m[0] = slope0 ? require_finite(*slope0, "slope") : end_slope(0, 1);
    m[n - 1] = slope1 ? require_finite(*slope1, "slope") : end_slope(n - 1, -1);

    if (n > 2) {
        // Tridiagonal system for interior slopes (C2 spline), Thomas algorithm.
        const std::size_t k = n - 2;
        std::vector<double> lo(k), di(k), up(k), rhs(k);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t i = j + 1;
            lo[j] = h[i];
            di[j] = 2 * (h[i - 1] + h[i]);
            up[j] = h[i - 1];
            rhs[j] = 3 * (h[i] * d[i - 1] + h[i - 1] * d[i]);
        }
        rhs[0] -= lo[0] * m[0];
        rhs[k - 1] -= up[k - 1] * m[n - 1];
        for (std::size_t j = 1; j < k; ++j) {
            const double w = lo[j] / di[j - 1];
            di[j] -= w * up[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        m[k] = rhs[k - 1] / di[k - 1];
        for (std::size_t j = k - 1; j-- > 0;)
            m[j + 1] = (rhs[j] - up[j] * m[j + 2]) / di[j];
    }

    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        cum[i + 1] = cum[i] + h[i] * (y[i] + y[i + 1]) / 2 + h[i] * h[i] * (m[i] - m[i + 1]) / 12;

    const double lo_t = t.front(), hi_t = t.back();
    TimeFunction out(std::make_shared<const Tabulated>(Tabulated{std::move(t), std::move(y), std::move(m), std::move(cum)}));
    out.set_domain(lo_t, hi_t);
    return out;
}

inline TimeFunction TimeFunction::composed(std::string profile, std::vector<double> params)
{
    if (params.size() != detail::composed_arity(profile))
        throw InvalidParameter("profile '" + profile + "' expects " + std::to_string(detail::composed_arity(profile))
                               + " parameters");
    for (double p : params)
        require_finite(p, "profile parameter");
    TimeFunction out(Composed{profile, params});
    if (profile == "gaussian" && !(params[2] > 0))
        throw InvalidParameter("gaussian width must be positive");
    if (profile == "roland_cerf") {
        if (!(params[0] > 0 && params[0] < 1) || !(params[1] > 0))
            throw InvalidParameter("roland_cerf profile needs 0 < x < 1 and epsilon > 0");
        out.set_domain(0.0, detail::roland_cerf_run_time(params[0], params[1]));
    }
    return out;
}

namespace detail {

struct HermiteSegment {
    std::size_t i;
    double h, s;
};

inline HermiteSegment locate(const TimeFunction::Tabulated& tab, double t)
{
    auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    std::size_t i = it == tab.t.begin() ? 0 : static_cast<std::size_t>(it - tab.t.begin()) - 1;
    i = std::min(i, tab.t.size() - 2);
    const double h = tab.t[i + 1] - tab.t[i];
    return {i, h, (t - tab.t[i]) / h};
}

} // namespace detail

inline double TimeFunction::operator()(double t) const
{
    check(t);
    return std::visit(
        [t](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>)
                return k.value;
            else if constexpr (std::is_same_v<K, Exponential>)
                return k.amplitude * std::exp(k.rate * t);
            else if constexpr (std::is_same_v<K, Linear>)
                return k.intercept + k.slope * t;
            else if constexpr (std::is_same_v<K, Composed>)
                return detail::composed_eval(k, t).value;
            else if constexpr (std::is_same_v<K, Callable>)
                return k.f(t);
            else {
                const auto seg = detail::locate(*k, t);
                const double s = seg.s, s2 = s * s, s3 = s2 * s;
                return (2 * s3 - 3 * s2 + 1) * k->y[seg.i] + (s3 - 2 * s2 + s) * seg.h * k->m[seg.i]
                     + (-2 * s3 + 3 * s2) * k->y[seg.i + 1] + (s3 - s2) * seg.h * k->m[seg.i + 1];
            }
        },
        kind_);
}

inline double TimeFunction::derivative(double t) const
{
    check(t);
    return std::visit(
        [t](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Constant>)
                return 0.0;
            else if constexpr (std::is_same_v<K, Exponential>)
                return k.amplitude * k.rate * std::exp(k.rate * t);
            else if constexpr (std::is_same_v<K, Linear>)
                return k.slope;
            else if constexpr (std::is_same_v<K, Composed>)
                return detail::composed_eval(k, t).slope;
            else if constexpr (std::is_same_v<K, Callable>)
                return k.df(t);
            else {
                const auto seg = detail::locate(*k, t);
                const double s = seg.s, s2 = s * s;
                return ((6 * s2 - 6 * s) * k->y[seg.i] + (-6 * s2 + 6 * s) * k->y[seg.i + 1]) / seg.h
                     + (3 * s2 - 4 * s + 1) * k->m[seg.i] + (3 * s2 - 2 * s) * k->m[seg.i + 1];
            }
        },
        kind_);
}

inline double TimeFunction::integral(double a, double b) const
{
    check(a);
    check(b);
    if (const auto* c = std::get_if<Constant>(&kind_))
        return c->value * (b - a);
    if (const auto* l = std::get_if<Linear>(&kind_))
        return l->intercept * (b - a) + 0.5 * l->slope * (b * b - a * a);
    if (const auto* e = std::get_if<Exponential>(&kind_)) {
        if (e->rate == 0.0)
            return e->amplitude * (b - a);
        return e->amplitude * std::exp(e->rate * a) * std::expm1(e->rate * (b - a)) / e->rate;
    }
    if (const auto* p = std::get_if<std::shared_ptr<const Tabulated>>(&kind_)) {
        const Tabulated& tab = **p;
        auto antiderivative = [&](double t) {
            const auto seg = detail::locate(tab, t);
            const double s = seg.s, s2 = s * s, s3 = s2 * s, s4 = s3 * s;
            return tab.cumulative[seg.i]
                 + seg.h * ((s4 / 2 - s3 + s) * tab.y[seg.i] + (s4 / 4 - 2 * s3 / 3 + s2 / 2) * seg.h * tab.m[seg.i]
                            + (-s4 / 2 + s3) * tab.y[seg.i + 1] + (s4 / 4 - s3 / 3) * seg.h * tab.m[seg.i + 1]);
        };
        return antiderivative(b) - antiderivative(a);
    }
    return integrate([this](double t) { return (*this)(t); }, a, b);
}

} // namespace qsd
