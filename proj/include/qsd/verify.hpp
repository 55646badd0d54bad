#pragma once

#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "gqs.hpp"
#include "inverse.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "rabi.hpp"
#include "schedules.hpp"
#include "zener.hpp"

// Cross-validation suites run by `qsd verify`.
namespace qsd::verify {

using std::numbers::pi;

struct Check {
    std::string suite, name;
    double max_error = 0.0, tolerance = 0.0;
    bool pass = false;
    std::string error; // exception text if the check threw
};

struct Settings {
    PropagationOptions propagation{1e-12, 1e-14}; // used by every ODE cross-check
    double norm_tolerance = 1e-9;
};

struct CheckFn {
    std::string suite, name;
    std::function<Check(const Settings&)> fn;
};

namespace detail {

inline Check make(std::string suite, std::string name, double err, double tol)
{
    return {std::move(suite), std::move(name), err, tol, err <= tol, {}};
}

inline std::vector<double> grid(double a, double b, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    return t;
}

inline PropagationResult propagate_gqs(const gqs::GqsParams& g, const std::vector<double>& times,
                                       const PropagationOptions& o)
{
    const double x = g.x(), q = std::sqrt(1 - x * x);
    PropagationProblem p{MatrixFunction([h = gqs::hamiltonian(g)](double) { return h; }), AmplitudePair(x, q), times,
                         g.hbar()};
    p.options = o;
    return propagate(p);
}

inline PropagationResult propagate_rabi(const rabi::RabiParams& rp, const std::vector<double>& times,
                                        const PropagationOptions& o)
{
    const double x = rp.x();
    PropagationProblem p{MatrixFunction([rp](double t) { return rabi::interaction_picture_matrix(rp, t); }),
                         AmplitudePair(std::sqrt(1 - x * x), x), times, rp.hbar(), 1};
    p.options = o;
    return propagate(p);
}

} // namespace detail

inline std::vector<CheckFn> closed_form_checks()
{
    using detail::make;
    const std::string S = "closed_forms";
    return {
        {S, "fg_optimum", [S](const Settings&) {
            double err = 0;
            for (double x : {0.1, 0.25, 0.5}) {
                const gqs::GqsParams g(1, 1, 0.0, 1, x);
                const auto o = gqs::optimal_time_and_pmax(g);
                err = std::max(err, std::abs(o.t_star / (pi / (2 * x)) - 1));
                err = std::max(err, std::abs(gqs::transition_probability(g, o.t_star) - 1));
            }
            return make(S, "fg_optimum", err, 1e-10);
        }},
        {S, "gqs_vs_ode", [S](const Settings& s) {
            std::mt19937_64 rng(2024);
            std::uniform_real_distribution<double> u(-1, 1), ux(0.05, 0.95), ut(0, 10);
            double err = 0;
            for (int k = 0; k < 10; ++k) {
                const gqs::GqsParams g(0.5 + std::abs(u(rng)), u(rng), cplx(u(rng), u(rng)), u(rng), ux(rng));
                std::vector<double> ts{0.0};
                for (int j = 0; j < 20; ++j)
                    ts.push_back(ut(rng));
                std::sort(ts.begin(), ts.end());
                ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
                const auto r = detail::propagate_gqs(g, ts, s.propagation);
                for (std::size_t i = 0; i < ts.size(); ++i)
                    err = std::max(err, std::abs(r.trace.p_target()[i] - gqs::transition_probability(g, ts[i])));
            }
            return make(S, "gqs_vs_ode", err, 1e-8);
        }},
        {S, "rabi_resonance", [S](const Settings&) {
            const rabi::RabiParams rp(0, 1, 1, 1, 0);
            double err = 0;
            for (double t : detail::grid(0, 2 * pi, 2000)) {
                const auto p = rabi::transition_probabilities(rp, t);
                err = std::max({err, std::abs(p.p2 - std::sin(t) * std::sin(t)), std::abs(p.p1 + p.p2 - 1)});
            }
            return make(S, "rabi_resonance", err, 1e-10);
        }},
        {S, "rabi_detuned_vs_ode", [S](const Settings& s) {
            const auto rp = rabi::RabiParams::from_detuning(0, 1, 1, 2, 0);
            const auto ts = detail::grid(0, 10, 201);
            const auto r = detail::propagate_rabi(rp, ts, s.propagation);
            double err = 0;
            for (std::size_t i = 0; i < ts.size(); ++i)
                err = std::max(err, std::abs(r.trace.p_target()[i] - rabi::transition_probabilities(rp, ts[i]).p2));
            return make(S, "rabi_detuned_vs_ode", err, 1e-8);
        }},
        {S, "norm_drift", [S](const Settings& s) {
            double drift = 0;
            const gqs::GqsParams g(1, 0.3, cplx(0.2, -0.4), 0.7, 0.3);
            drift = std::max(drift, detail::propagate_gqs(g, detail::grid(0, 20, 11), s.propagation).max_norm_drift);
            const auto rp = rabi::RabiParams::from_detuning(0, 1, 1, 2, 0.4);
            drift = std::max(drift, detail::propagate_rabi(rp, detail::grid(0, 20, 11), s.propagation).max_norm_drift);
            return make(S, "norm_drift", drift, s.norm_tolerance);
        }},
        {S, "zener_residual", [S](const Settings&) {
            zener::ZenerProblem z;
            const auto r = zener::zener_residual(z, detail::grid(0, 10, 501));
            return make(S, "zener_residual", std::max(r.max_residual, r.max_weber_residual), 1e-6);
        }},
    };
}

inline std::vector<CheckFn> schedule_checks()
{
    using detail::make;
    const std::string S = "schedules";
    return {
        {S, "roland_cerf_speed", [S](const Settings&) {
            double err = 0;
            for (double x : {0.05, 0.1, 0.3}) {
                const double eps = 0.1, T = schedules::roland_cerf_run_time(x, eps);
                for (double t : detail::grid(0, T, 200)) {
                    const double s = schedules::roland_cerf_schedule(x, eps, t);
                    const double g = schedules::spectral_gap(x * x, s);
                    err = std::max(err, std::abs(schedules::roland_cerf_speed(x, eps, t) - eps * g * g));
                }
            }
            return make(S, "roland_cerf_speed", err, 1e-9);
        }},
        {S, "roland_cerf_grover_time", [S](const Settings&) {
            const double T = schedules::roland_cerf_run_time(0.01, 1.0);
            return make(S, "roland_cerf_grover_time", std::abs(T / (pi / 0.02) - 1), 0.01);
        }},
        {S, "field_dictionary", [S](const Settings&) {
            double err = 0;
            const double x = 0.3;
            for (double s : {0.25, 0.5, 0.75}) {
                const auto f = schedules::adiabatic_field_path(x, s);
                err = std::max(err, std::abs(schedules::schedule_from_fields(f.omega / f.Omega, x) - s));
            }
            const auto a = schedules::affine_g_coefficients(0.7, -0.2, x);
            schedules::PrParams pr = schedules::PrParams::defaults(x);
            pr.b = a.b_pr;
            pr.c = a.c_pr;
            for (double t : {0.0, 0.5, 2.0}) {
                const double g = schedules::g_from_field_ratio(1.0, 0.7 * t - 0.2, x);
                err = std::max(err, std::abs(g - schedules::perez_romanelli_fields(schedules::PrVariant::FixedPointLike, pr, t).g));
            }
            return make(S, "field_dictionary", err, 1e-12);
        }},
        {S, "classify_eps_gap2", [S](const Settings& s) {
            const auto c = schedules::classify_schedule(schedules::SpeedLaw::EpsGap2, 0.1,
                                                        schedules::log_grid(1e-3, 1e-1, 5), {}, 1, s.propagation);
            Check k = make(S, "classify_eps_gap2", std::abs(c.slope + 0.5), 0.1);
            k.pass = k.pass && c.fixed_point;
            return k;
        }},
        {S, "classify_constant", [S](const Settings& s) {
            const auto c = schedules::classify_schedule(schedules::SpeedLaw::Constant, 0.1,
                                                        schedules::log_grid(1e-3, 1e-1, 5), {}, 1, s.propagation);
            Check k = make(S, "classify_constant", c.grover_scaling || c.fixed_point ? 1.0 : 0.0, 0.0);
            return k;
        }},
        {S, "norm_drift", [S](const Settings& s) {
            const auto pr = schedules::PrParams::defaults(0.1);
            const auto src = schedules::source_state(0.1);
            PropagationProblem p{MatrixFunction([pr](double t) {
                                     const auto fg = schedules::perez_romanelli_fields(
                                         schedules::PrVariant::Oscillatory, pr, t);
                                     return schedules::nonadiabatic_hamiltonian(fg.f, fg.g, pr.x);
                                 }),
                                 AmplitudePair(src[0], src[1]), detail::grid(0, 4 * pi, 101)};
            p.options = s.propagation;
            return make(S, "norm_drift", propagate(p).max_norm_drift, s.norm_tolerance);
        }},
    };
}

inline std::vector<CheckFn> inverse_checks()
{
    using detail::make;
    const std::string S = "inverse";
    return {
        {S, "scenario1_monotone", [S](const Settings&) {
            const auto p = inverse::Scenario1Params::resonance_with_index(0, pi / 2, 0.0);
            double drop = 0, prev = 0;
            for (double t : detail::grid(0, 6, 10001)) {
                const double v = inverse::scenario1_closed_forms(p, t).p_target;
                drop = std::max(drop, prev - v);
                prev = v;
            }
            return make(S, "scenario1_monotone", std::max(drop, 0.999 - prev), 0.0);
        }},
        {S, "scenario1_vs_ode", [S](const Settings& s) {
            const auto p = inverse::Scenario1Params::with_index(0, 1, 1, 0.0);
            const auto ts = detail::grid(0, 6, 121);
            const auto r = propagate_evolution(inverse::scenario1_fields(p), ts, 0.0, s.propagation);
            double err = std::abs(inverse::scenario1_closed_forms(p, 60.0).abs_beta_sq - 0.5);
            for (std::size_t i = 0; i < ts.size(); ++i)
                err = std::max(err,
                               std::abs(r.trace.p_target()[i] - inverse::scenario1_closed_forms(p, ts[i]).abs_beta_sq));
            return make(S, "scenario1_vs_ode", err, 1e-6);
        }},
        {S, "scenario2_vs_ode", [S](const Settings& s) {
            const auto p = inverse::Scenario2Params::converging(1.0);
            auto opt = s.propagation;
            opt.rotating_frame = true;
            const auto ts = detail::grid(0, 6, 601);
            const auto r = propagate_evolution(inverse::scenario2_fields(p), ts, 0.0, opt);
            inverse::Scenario2Context ctx(p);
            double err = 0;
            for (std::size_t i = 1; i < ts.size(); ++i)
                err = std::max(err, std::abs(r.trace.p_target()[i] - ctx.closed_forms(ts[i]).abs_beta_sq));
            return make(S, "scenario2_vs_ode", err, 1e-6);
        }},
        {S, "auxiliary_consistency", [S](const Settings&) {
            const auto p = inverse::Scenario1Params::with_index(0, 1, 1, 0.3);
            inverse::InverseContext ctx(inverse::scenario1_aux(p), p.longitudinal());
            double err = 0;
            for (double t : {0.5, 1.0, 2.0, 4.0}) {
                const auto a = ctx.amplitudes(t), b = inverse::scenario1_amplitudes(p, t);
                err = std::max({err, std::abs(a.alpha() - b.alpha()), std::abs(a.beta() - b.beta())});
            }
            return make(S, "auxiliary_consistency", err, 1e-9);
        }},
        {S, "norm_drift", [S](const Settings& s) {
            const auto p = inverse::Scenario1Params::with_index(0, 1, 1, 0.2);
            const auto r = propagate_evolution(inverse::scenario1_fields(p), detail::grid(0, 6, 13), 0.2, s.propagation);
            return make(S, "norm_drift", r.max_norm_drift, s.norm_tolerance);
        }},
    };
}

inline std::vector<CheckFn> suite(const std::string& name)
{
    if (name == "closed_forms")
        return closed_form_checks();
    if (name == "schedules")
        return schedule_checks();
    if (name == "inverse")
        return inverse_checks();
    if (name == "all") {
        auto out = closed_form_checks();
        for (auto&& v : {schedule_checks(), inverse_checks()})
            out.insert(out.end(), v.begin(), v.end());
        return out;
    }
    throw ConfigError("unknown suite '" + name + "'");
}

// Runs checks on up to `workers` threads; results keep the suite order.
inline std::vector<Check> run(const std::vector<CheckFn>& checks, const Settings& settings, unsigned workers)
{
    std::vector<Check> out(checks.size());
    parallel_for(checks.size(), workers, [&](std::size_t i) {
        try {
            out[i] = checks[i].fn(settings);
        } catch (const std::exception& e) {
            out[i] = {checks[i].suite, checks[i].name, 0.0, 0.0, false, e.what()};
        }
    });
    return out;
}

inline nlohmann::json report(const std::string& suite_name, const std::vector<Check>& checks)
{
    nlohmann::json list = nlohmann::json::array();
    bool ok = true;
    for (const auto& c : checks) {
        nlohmann::json j = {{"suite", c.suite}, {"name", c.name}, {"max_error", c.max_error},
                            {"tolerance", c.tolerance}, {"pass", c.pass}};
        if (!c.error.empty())
            j["error"] = c.error;
        list.push_back(j);
        ok = ok && c.pass;
    }
    return {{"suite", suite_name}, {"pass", ok}, {"checks", list}};
}

} // namespace qsd::verify
