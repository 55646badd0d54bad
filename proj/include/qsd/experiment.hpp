#pragma once

#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gqs.hpp"
#include "inverse.hpp"
#include "propagator.hpp"
#include "rabi.hpp"
#include "schedules.hpp"
#include "zener.hpp"

namespace qsd::experiment {

using json = nlohmann::json;

enum class Kind { gqs, rabi, adiabatic, nonadiabatic, inverse1, inverse2, classify, zener };

inline const std::map<std::string, Kind>& kind_names()
{
    static const std::map<std::string, Kind> m{{"gqs", Kind::gqs},           {"rabi", Kind::rabi},
                                               {"adiabatic", Kind::adiabatic}, {"nonadiabatic", Kind::nonadiabatic},
                                               {"inverse1", Kind::inverse1}, {"inverse2", Kind::inverse2},
                                               {"classify", Kind::classify}, {"zener", Kind::zener}};
    return m;
}

inline std::string to_string(Kind k)
{
    for (const auto& [name, v] : kind_names())
        if (v == k)
            return name;
    throw ConfigError("unknown experiment kind");
}

struct Sampling {
    std::optional<double> t_max;
    std::size_t n_samples = 2000;

    bool operator==(const Sampling&) const = default;
};

struct Output {
    std::string path;
    std::string format = "csv";

    bool operator==(const Output&) const = default;
};

struct ExperimentConfig {
    Kind experiment = Kind::rabi;
    json parameters = json::object();
    Sampling sampling;
    Output output;

    bool operator==(const ExperimentConfig&) const = default;
};

inline json to_json(const ExperimentConfig& c)
{
    json s = {{"n_samples", c.sampling.n_samples}};
    if (c.sampling.t_max)
        s["t_max"] = *c.sampling.t_max;
    return {{"experiment", to_string(c.experiment)},
            {"parameters", c.parameters},
            {"sampling", s},
            {"output", {{"path", c.output.path}, {"format", c.output.format}}}};
}

namespace detail {

inline void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& [k, _] : j.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
            throw ConfigError("unknown key '" + k + "' in " + where);
}

} // namespace detail

inline ExperimentConfig parse_config(const json& j)
{
    detail::only_keys(j, {"experiment", "parameters", "sampling", "output"}, "config");
    ExperimentConfig c;
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config needs a string 'experiment'");
    const auto it = kind_names().find(j["experiment"].get<std::string>());
    if (it == kind_names().end())
        throw ConfigError("unknown experiment '" + j["experiment"].get<std::string>() + "'");
    c.experiment = it->second;
    if (j.contains("parameters")) {
        if (!j["parameters"].is_object())
            throw ConfigError("'parameters' must be an object");
        c.parameters = j["parameters"];
    }
    if (j.contains("sampling")) {
        const json& s = j["sampling"];
        detail::only_keys(s, {"t_max", "n_samples"}, "sampling");
        if (s.contains("t_max")) {
            if (!s["t_max"].is_number() || !(s["t_max"].get<double>() > 0))
                throw ConfigError("sampling.t_max must be a positive number");
            c.sampling.t_max = s["t_max"].get<double>();
        }
        if (s.contains("n_samples")) {
            if (!s["n_samples"].is_number_integer() || s["n_samples"].get<long long>() < 2
                || s["n_samples"].get<long long>() > 10'000'000)
                throw ConfigError("sampling.n_samples must be an integer in [2, 1e7]");
            c.sampling.n_samples = s["n_samples"].get<std::size_t>();
        }
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        detail::only_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) {
            if (!o["path"].is_string())
                throw ConfigError("output.path must be a string");
            c.output.path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (o["format"] != "csv")
                throw ConfigError("output.format must be \"csv\"");
            c.output.format = "csv";
        }
    }
    return c;
}

inline ExperimentConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Typed access to the parameter map; every key must be consumed.
class Params {
public:
    Params(const json& j, std::string where) : j_(j), where_(std::move(where)) {}

    double num(const std::string& key, double fallback)
    {
        const auto v = opt_num(key);
        return v ? *v : fallback;
    }

    std::optional<double> opt_num(const std::string& key)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return std::nullopt;
        if (!j_[key].is_number())
            throw ConfigError(where_ + "." + key + " must be a number");
        return j_[key].get<double>();
    }

    int integer(const std::string& key, int fallback)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_number_integer())
            throw ConfigError(where_ + "." + key + " must be an integer");
        return j_[key].get<int>();
    }

    bool flag(const std::string& key, bool fallback)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_boolean())
            throw ConfigError(where_ + "." + key + " must be a boolean");
        return j_[key].get<bool>();
    }

    std::string str(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return fallback;
        if (!j_[key].is_string())
            throw ConfigError(where_ + "." + key + " must be a string");
        const std::string v = j_[key].get<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return v == a; }))
            throw ConfigError(where_ + "." + key + " has unsupported value '" + v + "'");
        return v;
    }

    void finish() const
    {
        for (const auto& [k, _] : j_.items())
            if (!used_.count(k))
                throw ConfigError("unknown parameter '" + k + "' in " + where_);
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

inline std::vector<double> sample_times(double t_max, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
    t.back() = t_max;
    return t;
}

inline PropagationOptions propagation_options(Params& p, PropagationOptions o = {})
{
    o.rel_tol = p.num("rel_tol", o.rel_tol);
    o.abs_tol = p.num("abs_tol", o.abs_tol);
    return o;
}

struct RunResult {
    TransitionTrace trace;
    std::optional<schedules::Classification> classification;
};

namespace detail {

inline double t_max_or(const ExperimentConfig& c, double fallback)
{
    return c.sampling.t_max ? *c.sampling.t_max : fallback;
}

inline RunResult run_gqs(const ExperimentConfig& c, Params& p)
{
    const gqs::GqsParams g(p.num("E", 1.0), p.num("alpha", 1.0), cplx(p.num("beta_re", 0.0), p.num("beta_im", 0.0)),
                           p.num("delta", 1.0), p.num("x", 0.5), p.num("hbar", 1.0));
    const std::string method = p.str("method", "closed_form", {"closed_form", "propagate"});
    const auto opt = propagation_options(p);
    p.finish();
    const auto times = sample_times(t_max_or(c, 2 * std::numbers::pi), c.sampling.n_samples);
    if (method == "propagate") {
        const double x = g.x(), q = std::sqrt(1 - x * x);
        PropagationProblem prob{MatrixFunction([h = gqs::hamiltonian(g)](double) { return h; }), AmplitudePair(x, q),
                                times, g.hbar()};
        prob.options = opt;
        return {propagate(prob).trace, {}};
    }
    RunResult r;
    for (double t : times) {
        const double pt = gqs::transition_probability(g, t);
        r.trace.push_back(t, pt, 1 - pt, gqs::evolved_state(g, t).norm() - 1);
    }
    return r;
}

inline RunResult run_rabi(const ExperimentConfig& c, Params& p)
{
    const auto rp = rabi::RabiParams::from_detuning(p.num("E1", 0.0), p.num("E2", 1.0), p.num("Gamma", 1.0),
                                                    p.num("detuning", 0.0), p.num("x", 0.0), p.num("hbar", 1.0));
    const std::string method = p.str("method", "closed_form", {"closed_form", "propagate"});
    const auto opt = propagation_options(p);
    p.finish();
    const auto times = sample_times(t_max_or(c, 2 * std::numbers::pi), c.sampling.n_samples);
    if (method == "propagate") {
        const double x = rp.x();
        // c1 (|E1>) first; the target level is |E2>
        PropagationProblem prob{MatrixFunction([rp](double t) { return rabi::interaction_picture_matrix(rp, t); }),
                                AmplitudePair(std::sqrt(1 - x * x), x), times, rp.hbar(), 1};
        prob.options = opt;
        return {propagate(prob).trace, {}};
    }
    RunResult r;
    for (double t : times) {
        const auto pr = rabi::transition_probabilities(rp, t);
        r.trace.push_back(t, pr.p2, pr.p1, pr.p1 + pr.p2 - 1);
    }
    return r;
}

inline RunResult run_adiabatic(const ExperimentConfig& c, Params& p)
{
    const double x = p.num("x", 0.1), eps = p.num("epsilon", 0.1);
    const auto opt = propagation_options(p);
    p.finish();
    const auto spec = schedules::roland_cerf_spec(x, eps);
    const double t_max = t_max_or(c, spec.T());
    if (t_max > spec.T())
        throw ConfigError("sampling.t_max exceeds the schedule run time " + std::to_string(spec.T()));
    const auto src = schedules::source_state(x);
    PropagationProblem prob{MatrixFunction([spec](double t) { return schedules::adiabatic_hamiltonian(spec, t); }),
                            AmplitudePair(src[0], src[1]), sample_times(t_max, c.sampling.n_samples)};
    prob.options = opt;
    return {propagate(prob).trace, {}};
}

inline RunResult run_nonadiabatic(const ExperimentConfig& c, Params& p)
{
    const std::string v = p.str("variant", "oscillatory", {"oscillatory", "fixed_point"});
    auto pr = schedules::PrParams::defaults(p.num("x", 0.1));
    pr.theta0 = p.num("theta0", pr.theta0);
    pr.Omega0 = p.num("Omega0", pr.Omega0);
    pr.alpha_pr = p.num("alpha_pr", pr.alpha_pr);
    pr.gamma_pr = p.num("gamma_pr", pr.gamma_pr);
    pr.b = p.num("b", pr.b);
    pr.c = p.num("c", pr.c);
    const auto opt = propagation_options(p);
    p.finish();
    const auto variant = v == "oscillatory" ? schedules::PrVariant::Oscillatory : schedules::PrVariant::FixedPointLike;
    const double x = pr.x;
    const auto src = schedules::source_state(x);
    PropagationProblem prob{MatrixFunction([variant, pr](double t) {
                                const auto fg = schedules::perez_romanelli_fields(variant, pr, t);
                                return schedules::nonadiabatic_hamiltonian(fg.f, fg.g, pr.x);
                            }),
                            AmplitudePair(src[0], src[1]),
                            sample_times(t_max_or(c, 4 * std::numbers::pi), c.sampling.n_samples)};
    prob.options = opt;
    return {propagate(prob).trace, {}};
}

inline RunResult trace_from_evolution(const FieldConfig& f, const std::vector<double>& times, double x,
                                      const PropagationOptions& opt)
{
    return {propagate_evolution(f, times, x, opt).trace, {}};
}

inline RunResult run_inverse1(const ExperimentConfig& c, Params& p)
{
    const bool res = p.flag("resonance", false);
    const double omega0 = p.num("omega0", 1.0), x = p.num("x", 0.0), hbar = p.num("hbar", 1.0);
    const auto Omega = TimeFunction::constant(p.num("Omega", 0.0));
    const auto xi = p.opt_num("xi");
    const int n = p.integer("n", 0);
    const auto cc = p.opt_num("c");
    const std::string method = p.str("method", "closed_form", {"closed_form", "propagate"});
    auto opt = propagation_options(p);
    p.finish();
    if (res && cc)
        throw ConfigError("'c' is meaningless with resonance = true");
    if (!res && !cc)
        throw ConfigError("finite-c scenario needs 'c'");
    const auto sp = res ? (xi ? inverse::Scenario1Params::resonance(omega0, *xi, x, hbar, Omega)
                              : inverse::Scenario1Params::resonance_with_index(n, omega0, x, hbar, Omega))
                        : (xi ? inverse::Scenario1Params(*cc, omega0, *xi, x, hbar, Omega)
                              : inverse::Scenario1Params::with_index(n, *cc, omega0, x, hbar, Omega));
    const auto times = sample_times(t_max_or(c, 6.0), c.sampling.n_samples);
    if (method == "propagate")
        return trace_from_evolution(inverse::scenario1_fields(sp), times, x, opt);
    RunResult r;
    for (double t : times) {
        const auto cf = inverse::scenario1_closed_forms(sp, t);
        r.trace.push_back(t, cf.p_target, 1 - cf.p_target, cf.abs_alpha_sq + cf.abs_beta_sq - 1);
    }
    return r;
}

inline RunResult run_inverse2(const ExperimentConfig& c, Params& p)
{
    const double xi = p.num("xi", 1.0), hbar = p.num("hbar", 1.0), x = p.num("x", 0.0);
    const double omega0 = p.num("omega0", inverse::scenario2_omega0(xi, hbar));
    const double phase_rate = p.num("phase_rate", 0.0);
    const std::string method = p.str("method", "closed_form", {"closed_form", "propagate"});
    auto opt = propagation_options(p);
    p.finish();
    opt.rotating_frame = true;
    const inverse::Scenario2Params sp(omega0, xi, x, hbar, TimeFunction::linear(0.0, phase_rate));
    const auto times = sample_times(t_max_or(c, 6.0), c.sampling.n_samples);
    if (method == "propagate")
        return trace_from_evolution(inverse::scenario2_fields(sp), times, x, opt);
    inverse::Scenario2Context ctx(sp);
    RunResult r;
    for (double t : times) {
        const auto cf = ctx.closed_forms(t);
        r.trace.push_back(t, cf.p_target, 1 - cf.p_target, cf.abs_alpha_sq + cf.abs_beta_sq - 1);
    }
    return r;
}

inline schedules::SpeedLaw speed_law(const std::string& s)
{
    using schedules::SpeedLaw;
    static const std::map<std::string, SpeedLaw> m{{"constant", SpeedLaw::Constant},
                                                   {"eps_w", SpeedLaw::EpsW},
                                                   {"gap3_over_root", SpeedLaw::Gap3OverRoot},
                                                   {"eps_gap3", SpeedLaw::EpsGap3},
                                                   {"eps_gap2", SpeedLaw::EpsGap2}};
    return m.at(s);
}

inline RunResult run_classify(const ExperimentConfig&, Params& p, unsigned workers)
{
    const std::string law = p.str("law", "eps_gap2", {"constant", "eps_w", "gap3_over_root", "eps_gap3", "eps_gap2"});
    const double eps = p.num("epsilon", 0.1);
    const double lo = p.num("w_min", 1e-3), hi = p.num("w_max", 1e-1);
    const int n = p.integer("n_points", 5);
    const auto delta = p.opt_num("delta");
    const auto opt = propagation_options(p, {1e-12, 1e-14});
    p.finish();
    if (n < 2 || !(lo > 0) || !(hi > lo))
        throw ConfigError("classification grid needs 0 < w_min < w_max and n_points >= 2");
    std::function<double(double)> d;
    if (delta)
        d = [v = *delta](double) { return v; };
    RunResult r;
    r.classification =
        schedules::classify_schedule(speed_law(law), eps, schedules::log_grid(lo, hi, static_cast<std::size_t>(n)), d,
                                     workers, opt);
    return r;
}

inline RunResult run_zener(const ExperimentConfig& c, Params& p)
{
    zener::ZenerProblem z;
    z.alpha = p.num("alpha", 1.0);
    z.f_sq = p.num("f_sq", 1.0);
    z.c1_0 = {p.num("c1_re", 1.0), p.num("c1_im", 0.0)};
    z.c1_dot_0 = {p.num("c1_dot_re", 0.0), p.num("c1_dot_im", 0.0)};
    OdeOptions opt{p.num("rel_tol", 1e-12), p.num("abs_tol", 1e-14)};
    p.finish();
    const auto sol = zener::solve_zener(z, sample_times(t_max_or(c, 10.0), c.sampling.n_samples), opt);
    return {sol.trace(z.f_sq), {}};
}

} // namespace detail

inline RunResult run(const ExperimentConfig& c, unsigned workers = 1)
{
    Params p(c.parameters, "parameters");
    switch (c.experiment) {
    case Kind::gqs:
        return detail::run_gqs(c, p);
    case Kind::rabi:
        return detail::run_rabi(c, p);
    case Kind::adiabatic:
        return detail::run_adiabatic(c, p);
    case Kind::nonadiabatic:
        return detail::run_nonadiabatic(c, p);
    case Kind::inverse1:
        return detail::run_inverse1(c, p);
    case Kind::inverse2:
        return detail::run_inverse2(c, p);
    case Kind::classify:
        return detail::run_classify(c, p, workers);
    case Kind::zener:
        return detail::run_zener(c, p);
    }
    throw ConfigError("unknown experiment");
}

// Figure datasets. Ranges not fixed by the figures: [0, 2 pi] for fig1, [0, 6] otherwise.
inline ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig c;
    c.sampling.n_samples = 2000;
    if (name == "fig1") {
        c.experiment = Kind::rabi;
        c.parameters = {{"E1", 0.0}, {"E2", 1.0}, {"Gamma", 1.0}, {"detuning", 0.0}, {"x", 0.0}, {"hbar", 1.0}};
        c.sampling.t_max = 2 * std::numbers::pi;
    } else if (name == "fig3") {
        c.experiment = Kind::inverse1;
        c.parameters = {{"resonance", true}, {"omega0", std::numbers::pi / 2}, {"xi", 1.0}, {"x", 0.0}, {"hbar", 1.0}};
        c.sampling.t_max = 6.0;
    } else if (name == "fig4") {
        c.experiment = Kind::inverse2;
        c.parameters = {{"xi", 1.0}, {"x", 0.0}, {"hbar", 1.0}};
        c.sampling.t_max = 6.0;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig1, fig3 or fig4)");
    }
    c.output.path = name + ".csv";
    return c;
}

inline void write_classification_csv(const schedules::Classification& c, std::ostream& os)
{
    os << "w,epsilon,T,p_final,satisfies_fp\n";
    char buf[256];
    for (const auto& r : c.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s\n", r.w, r.epsilon, r.T, r.p_final,
                      r.satisfies_fp ? "true" : "false");
        os << buf;
    }
}

inline std::string verdict_json(const schedules::Classification& c)
{
    json v = {{"grover_scaling", c.grover_scaling}, {"fixed_point", c.fixed_point}, {"slope", c.slope}};
    return v.dump();
}

} // namespace qsd::experiment
