#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "time_function.hpp"

// Adiabatic and nonadiabatic search Hamiltonians in the {|w>, |r>} basis,
// |s> = x|w> + sqrt(1 - x^2)|r>, with H0 = I - |s><s| and H1 = I - |w><w|.
namespace qsd::schedules {

inline void check_overlap(double x)
{
    if (!(require_finite(x, "x") > 0 && x < 1))
        throw InvalidParameter("overlap x must lie in (0, 1)");
}

inline std::array<cplx, 2> source_state(double x) { return {x, std::sqrt(1 - x * x)}; }

inline Mat2 h0(double x)
{
    const double q = std::sqrt(1 - x * x);
    return {1 - x * x, -x * q, -x * q, 1 - q * q};
}

inline Mat2 h1() { return {0.0, 0.0, 0.0, 1.0}; }

inline Mat2 adiabatic_hamiltonian(double x, double s)
{
    check_overlap(x);
    return cplx(1 - s) * h0(x) + cplx(s) * h1();
}

inline double spectral_gap(double w, double s) { return std::sqrt(1 - 4 * s * (1 - s) * (1 - w)); }

class AdiabaticSpec {
public:
    AdiabaticSpec(double x, double epsilon, TimeFunction schedule, double T)
        : x_(x), epsilon_(epsilon), schedule_(std::move(schedule)), T_(T)
    {
        check_overlap(x);
        if (!(require_finite(epsilon, "epsilon") > 0 && epsilon < 1))
            throw InvalidParameter("epsilon must lie in (0, 1)");
        if (!(require_finite(T, "T") > 0))
            throw InvalidParameter("run time must be positive");
        if (std::abs(schedule_(0.0)) > 1e-9 || std::abs(schedule_(T) - 1) > 1e-9)
            throw InvalidParameter("schedule must satisfy s(0) = 0 and s(T) = 1");
        double prev = schedule_(0.0);
        for (int k = 1; k <= 1000; ++k) {
            const double s = schedule_(T * k / 1000.0);
            if (s < prev - 1e-12)
                throw InvalidParameter("schedule must be nondecreasing");
            prev = s;
        }
    }

    double x() const { return x_; }
    double epsilon() const { return epsilon_; }
    double T() const { return T_; }
    const TimeFunction& schedule() const { return schedule_; }

private:
    double x_, epsilon_;
    TimeFunction schedule_;
    double T_;
};

inline Mat2 adiabatic_hamiltonian(const AdiabaticSpec& spec, double t)
{
    if (!(t >= 0 && t <= spec.T()))
        throw InvalidParameter("t outside [0, T]");
    return adiabatic_hamiltonian(spec.x(), spec.schedule()(t));
}

inline double roland_cerf_run_time(double x, double epsilon)
{
    check_overlap(x);
    if (!(require_finite(epsilon, "epsilon") > 0))
        throw InvalidParameter("epsilon must be positive");
    return detail::roland_cerf_run_time(x, epsilon);
}

inline TimeFunction roland_cerf_profile(double x, double epsilon)
{
    return TimeFunction::composed("roland_cerf", {x, epsilon});
}

inline double roland_cerf_schedule(double x, double epsilon, double t) { return roland_cerf_profile(x, epsilon)(t); }

inline double roland_cerf_speed(double x, double epsilon, double t)
{
    return roland_cerf_profile(x, epsilon).derivative(t);
}

inline AdiabaticSpec roland_cerf_spec(double x, double epsilon)
{
    return AdiabaticSpec(x, epsilon, roland_cerf_profile(x, epsilon), roland_cerf_run_time(x, epsilon));
}

// Transverse field along the Roland-Cerf path.
inline double roland_cerf_transverse_field(double x, double epsilon, double t)
{
    const double T = roland_cerf_run_time(x, epsilon);
    if (!(t >= 0 && t <= T))
        throw InvalidParameter("t outside [0, T]");
    const double q = std::sqrt(1 - x * x);
    return 0.5 * (x * x * std::tan(2 * epsilon * x * q * t - std::atan(q / x)) - x * q);
}

struct AdiabaticitySample {
    double t, s;
    double lhs;        // |ds/dt|
    double rhs;        // epsilon gap^2 / |<1| dH/ds |0>|
    double saturation; // epsilon gap^2
};

inline std::vector<AdiabaticitySample> local_adiabaticity_check(const AdiabaticSpec& spec,
                                                                const std::vector<double>& t_grid)
{
    const double x = spec.x(), w = x * x;
    const Mat2 dh = h1() - h0(x);
    std::vector<AdiabaticitySample> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0 && t <= spec.T()))
            throw InvalidParameter("t outside [0, T]");
        const double s = spec.schedule()(t);
        const auto e = hermitian_eigen(adiabatic_hamiltonian(x, s));
        const cplx m = std::conj(e.v1[0]) * (dh.m11 * e.v0[0] + dh.m12 * e.v0[1])
                     + std::conj(e.v1[1]) * (dh.m21 * e.v0[0] + dh.m22 * e.v0[1]);
        const double g = spectral_gap(w, s);
        out.push_back({t, s, std::abs(spec.schedule().derivative(t)), spec.epsilon() * g * g / std::abs(m),
                       spec.epsilon() * g * g});
    }
    return out;
}

enum class SpeedLaw { Constant, EpsW, Gap3OverRoot, EpsGap3, EpsGap2 };

inline double speed(SpeedLaw law, double epsilon, double w, double s)
{
    const double g = spectral_gap(w, s);
    switch (law) {
    case SpeedLaw::Constant:
        return epsilon;
    case SpeedLaw::EpsW:
        return epsilon * w;
    case SpeedLaw::Gap3OverRoot:
        return epsilon / std::sqrt(w * (1 - w)) * g * g * g;
    case SpeedLaw::EpsGap3:
        return epsilon * g * g * g;
    case SpeedLaw::EpsGap2:
        return epsilon * g * g;
    }
    throw InvalidParameter("unknown speed law");
}

struct ClassificationRow {
    double w, epsilon, T, p_final;
    bool satisfies_fp;
};

struct Classification {
    std::vector<ClassificationRow> rows;
    double slope = 0.0;
    double p_floor = 1.0;
    bool grover_scaling = false;
    bool fixed_point = false;
};

// Run time T(w) = int_0^1 ds / v(s) and success probability |<w|psi(T)>|^2,
// propagating in the schedule variable with H(s) / v(s) from |s>.
inline ClassificationRow classify_point(SpeedLaw law, double epsilon, double w, double delta,
                                        const PropagationOptions& opt = {})
{
    const double x = std::sqrt(w);
    auto v = [&](double s) { return speed(law, epsilon, w, s); };
    auto inv = [&](double s) { return 1 / v(s); };
    const double T = integrate(inv, 0.0, 0.5, 1e-10) + integrate(inv, 0.5, 1.0, 1e-10);
    const auto src = source_state(x);
    PropagationProblem p{MatrixFunction([&](double s) {
                             Mat2 h = adiabatic_hamiltonian(x, s) - cplx(0.5) * Mat2::identity();
                             return cplx(1 / v(s)) * h;
                         }),
                         AmplitudePair(src[0], src[1]),
                         {0.0, 1.0}};
    p.options = opt;
    const double pf = propagate(p).trace.p_target().back();
    return {w, epsilon, T, pf, pf >= 1 - delta * delta};
}

inline Classification classify_schedule(SpeedLaw law, double epsilon, const std::vector<double>& w_grid,
                                        const std::function<double(double)>& delta = {}, unsigned workers = 1,
                                        const PropagationOptions& opt = {1e-12, 1e-14})
{
    if (!(require_finite(epsilon, "epsilon") > 0 && epsilon < 1))
        throw InvalidParameter("epsilon must lie in (0, 1)");
    if (w_grid.size() < 5)
        throw GridTooSmall("classification needs at least 5 grid points");
    const auto [lo, hi] = std::minmax_element(w_grid.begin(), w_grid.end());
    for (double w : w_grid)
        if (!(require_finite(w, "w") > 0 && w < 1))
            throw InvalidParameter("grid values must lie in (0, 1)");
    if (*hi / *lo < 100 * (1 - 1e-9))
        throw GridTooSmall("classification grid must span at least two decades");
    const double d = delta ? delta(epsilon) : epsilon;

    Classification c;
    c.rows.resize(w_grid.size());
    parallel_for(w_grid.size(), workers, [&](std::size_t i) { c.rows[i] = classify_point(law, epsilon, w_grid[i], d, opt); });

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(c.rows.size());
    c.fixed_point = true;
    for (const auto& r : c.rows) {
        const double lx = std::log(r.w), ly = std::log(r.T);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        c.fixed_point = c.fixed_point && r.satisfies_fp;
        c.p_floor = std::min(c.p_floor, r.p_final);
    }
    c.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    c.grover_scaling = std::abs(c.slope + 0.5) <= 0.1;
    return c;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
}

// Nonadiabatic H = f H0 + g H1.
struct NonadiabaticSpec {
    TimeFunction f, g;
    double x;
};

inline Mat2 nonadiabatic_hamiltonian(double f, double g, double x)
{
    check_overlap(x);
    return cplx(f) * h0(x) + cplx(g) * h1();
}

inline Mat2 nonadiabatic_hamiltonian(const NonadiabaticSpec& spec, double t)
{
    return nonadiabatic_hamiltonian(spec.f(t), spec.g(t), spec.x);
}

enum class PrVariant { Oscillatory, FixedPointLike };

struct PrParams {
    double x = 0.1;
    double theta0 = 0.0, Omega0 = 1.0, alpha_pr = 0.0, gamma_pr = 20.0; // oscillatory variant
    double b = 0.0, c = 1.0;                                            // fixed-point-like variant

    // theta0 is chosen so that H(0) = gamma_pr H0, i.e. |s> starts in an eigenstate.
    static PrParams defaults(double x)
    {
        check_overlap(x);
        PrParams p;
        p.x = x;
        p.theta0 = -std::atan2(2 * x * std::sqrt(1 - x * x), 1 - 2 * x * x);
        return p;
    }
};

struct ControlPair {
    double f, g;
};

inline ControlPair perez_romanelli_fields(PrVariant v, const PrParams& p, double t)
{
    check_overlap(p.x);
    const double k = p.x * std::sqrt(1 - p.x * p.x), m = 1 - 2 * p.x * p.x;
    if (v == PrVariant::FixedPointLike)
        return {1.0, m + k * (p.b + p.c * t)};
    const double th = p.theta0 + 2 * p.Omega0 * t;
    const double amp = -std::abs(p.alpha_pr * t + p.gamma_pr) / (2 * k);
    return {amp * std::sin(th), amp * (2 * k * std::cos(th) + m * std::sin(th))};
}

inline NonadiabaticSpec perez_romanelli_spec(PrVariant v, const PrParams& p)
{
    const double h = 1e-6;
    auto comp = [v, p, h](bool want_g) {
        auto val = [v, p, want_g](double t) {
            const ControlPair fg = perez_romanelli_fields(v, p, t);
            return want_g ? fg.g : fg.f;
        };
        auto der = [val, h](double t) { return (val(t + h) - val(t - h)) / (2 * h); };
        return TimeFunction::callable(val, der);
    };
    return {comp(false), comp(true), p.x};
}

// Longitudinal and transverse components of a real Hamiltonian in the
// {|w>, |r>} basis, taking |r> as the upper level:
//   omega = H_wr, Omega = (H_rr - H_ww) / 2.
struct FieldComponents {
    double omega, Omega;
};

inline FieldComponents field_components(const Mat2& h)
{
    return {h.m12.real(), 0.5 * (h.m22.real() - h.m11.real())};
}

inline FieldComponents adiabatic_field_path(double x, double s) { return field_components(adiabatic_hamiltonian(x, s)); }

inline FieldComponents nonadiabatic_fields(double f, double g, double x)
{
    return field_components(nonadiabatic_hamiltonian(f, g, x));
}

inline double ratio_denominator(double r, double x)
{
    const double q = std::sqrt(1 - x * x);
    return 2 * x * q - 2 * r * (1 - x * x);
}

inline double schedule_from_fields(double omega_over_Omega, double x)
{
    check_overlap(x);
    const double r = require_finite(omega_over_Omega, "field ratio");
    const double den = ratio_denominator(r, x);
    if (std::abs(den) < 1e-14 * std::max(1.0, std::abs(r)))
        throw SingularRatio("field ratio makes the schedule singular");
    return (2 * x * std::sqrt(1 - x * x) - r * (1 - 2 * x * x)) / den;
}

inline double speed_from_field_rate(double omega_over_Omega, double d_ratio_dt, double x)
{
    check_overlap(x);
    const double den = ratio_denominator(require_finite(omega_over_Omega, "field ratio"), x);
    if (std::abs(den) < 1e-14 * std::max(1.0, std::abs(omega_over_Omega)))
        throw SingularRatio("field ratio makes the schedule singular");
    return 2 * x * std::sqrt(1 - x * x) / (den * den) * require_finite(d_ratio_dt, "ratio rate");
}

inline double g_from_field_ratio(double f, double Omega_over_omega, double x)
{
    check_overlap(x);
    return ((1 - 2 * x * x) - 2 * Omega_over_omega * x * std::sqrt(1 - x * x)) * f;
}

// f = 1 and Omega/omega = a t + b give g(t) = g0 + g1 t, which is the
// fixed-point-like form with (b', c') = (-2b, -2a).
struct AffineG {
    double g0, g1, b_pr, c_pr;
};

inline AffineG affine_g_coefficients(double a, double b, double x)
{
    check_overlap(x);
    const double k = x * std::sqrt(1 - x * x);
    return {(1 - 2 * x * x) - 2 * b * k, -2 * a * k, -2 * b, -2 * a};
}

struct ResonanceRatios {
    double ratio_fixed; // omega / Omega = x / sqrt(1 - x^2)
    double c_of_x;      // hbar x / sqrt(1 - x^2)
    double grc_ratio;   // c_param / hbar
};

inline ResonanceRatios resonance_ratio_identities(double x, double c_param, double hbar = 1.0)
{
    check_overlap(x);
    if (!(require_finite(hbar, "hbar") > 0))
        throw InvalidParameter("hbar must be positive");
    const double r = x / std::sqrt(1 - x * x);
    return {r, hbar * r, require_finite(c_param, "c") / hbar};
}

} // namespace qsd::schedules
