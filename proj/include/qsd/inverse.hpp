#pragma once

#include <map>
#include <numbers>
#include <optional>
#include <variant>

#include "field.hpp"
#include "quadrature.hpp"

// Exact su(2) solutions generated by an auxiliary function X(t) with X(0) = 0:
//   beta = X alpha / (i hbar),  omega = alpha^2 X',
//   alpha = hbar / sqrt(hbar^2 + |X|^2) exp(-i int [Omega / hbar + Im(X' conj X) / (hbar^2 + |X|^2)]).
namespace qsd::inverse {

using std::numbers::pi;

// X = c sin(phi) exp(i phi)
struct SinPhase {
    double c;
    TimeFunction phi;
};

// X = A exp(i phi)
struct AmpPhase {
    TimeFunction A;
    TimeFunction phi;
};

class AuxiliaryFunction {
public:
    using Form = std::variant<SinPhase, AmpPhase>;

    explicit AuxiliaryFunction(Form form, double hbar = 1.0) : form_(std::move(form)), hbar_(hbar)
    {
        if (!(require_finite(hbar, "hbar") > 0))
            throw InvalidParameter("hbar must be positive");
        if (const auto* s = std::get_if<SinPhase>(&form_)) {
            require_finite(s->c, "c");
            if (std::abs(s->phi(0.0)) > 1e-12)
                throw InvalidParameter("X(0) must vanish: phi(0) != 0");
        } else {
            const auto& a = std::get<AmpPhase>(form_);
            if (std::abs(a.A(0.0)) > 1e-12)
                throw InvalidParameter("X(0) must vanish: A(0) != 0");
        }
    }

    static AuxiliaryFunction zero(double hbar = 1.0)
    {
        return AuxiliaryFunction(AmpPhase{TimeFunction::constant(0.0), TimeFunction::constant(0.0)}, hbar);
    }

    const Form& form() const { return form_; }
    double hbar() const { return hbar_; }

    cplx X(double t) const
    {
        if (const auto* s = std::get_if<SinPhase>(&form_)) {
            const double ph = s->phi(t);
            return s->c * std::sin(ph) * std::polar(1.0, ph);
        }
        const auto& a = std::get<AmpPhase>(form_);
        return std::polar(1.0, a.phi(t)) * a.A(t);
    }

    cplx X_dot(double t) const
    {
        if (const auto* s = std::get_if<SinPhase>(&form_)) {
            const double ph = s->phi(t);
            return s->c * s->phi.derivative(t) * std::polar(1.0, 2 * ph);
        }
        const auto& a = std::get<AmpPhase>(form_);
        return std::polar(1.0, a.phi(t)) * cplx(a.A.derivative(t), a.A(t) * a.phi.derivative(t));
    }

private:
    Form form_;
    double hbar_;
};

// Evaluation context holding a cumulative cache of the phase integral. Not
// meant to be shared between threads.
class InverseContext {
public:
    InverseContext(AuxiliaryFunction aux, TimeFunction Omega) : aux_(std::move(aux)), Omega_(std::move(Omega)) {}

    const AuxiliaryFunction& aux() const { return aux_; }

    double phase_rate(double t) const
    {
        const double hb = aux_.hbar();
        const cplx X = aux_.X(t);
        return Omega_(t) / hb + (aux_.X_dot(t) * std::conj(X)).imag() / (hb * hb + std::norm(X));
    }

    double phase(double t)
    {
        if (!(require_finite(t, "t") >= 0))
            throw InvalidParameter("t must be non-negative");
        auto it = std::prev(cache_.upper_bound(t));
        if (it->first == t)
            return it->second;
        const double v = it->second + integrate([this](double s) { return phase_rate(s); }, it->first, t, 1e-11, 1e-13);
        cache_.emplace(t, v);
        return v;
    }

    AmplitudePair amplitudes(double t)
    {
        const double hb = aux_.hbar();
        const cplx X = aux_.X(t);
        const cplx alpha = std::polar(hb / std::sqrt(hb * hb + std::norm(X)), -phase(t));
        return AmplitudePair(alpha, X * alpha / (I * hb));
    }

    cplx transverse_field(double t)
    {
        const cplx alpha = amplitudes(t).alpha();
        if (std::abs(alpha) < 1e-8)
            throw VanishingAlpha("|alpha| below 1e-8 at t = " + std::to_string(t));
        return alpha * alpha * aux_.X_dot(t);
    }

private:
    AuxiliaryFunction aux_;
    TimeFunction Omega_;
    std::map<double, double> cache_{{0.0, 0.0}};
};

inline AmplitudePair amplitudes_from_X(const AuxiliaryFunction& aux, const TimeFunction& Omega, double t)
{
    return InverseContext(aux, Omega).amplitudes(t);
}

inline cplx recover_transverse_field(const AuxiliaryFunction& aux, const TimeFunction& Omega, double t)
{
    return InverseContext(aux, Omega).transverse_field(t);
}

struct ClosedForms {
    double abs_alpha_sq, abs_beta_sq, p_target;
};

// ---------------------------------------------------------------------------
// Scenario 1: |omega| = omega0 exp(-xi t), X = c sin(phi) exp(i phi), with the
// drive phase tied to Omega by |omega| / c = Omega / hbar + phi_omega' / 2.

inline double scenario1_xi(int n, double c, double omega0, double hbar = 1.0)
{
    if (n < 0)
        throw InvalidParameter("resonance index must be non-negative");
    if (!(require_finite(c, "c") != 0))
        throw InvalidParameter("c must be nonzero");
    if (!(require_finite(omega0, "omega0") > 0) || !(require_finite(hbar, "hbar") > 0))
        throw InvalidParameter("omega0 and hbar must be positive");
    return 2.0 / ((2 * n + 1) * pi) * (std::hypot(hbar, c) / std::abs(c)) * (omega0 / hbar);
}

// c -> infinity
inline double scenario1_xi_resonance(int n, double omega0, double hbar = 1.0)
{
    if (n < 0)
        throw InvalidParameter("resonance index must be non-negative");
    if (!(require_finite(omega0, "omega0") > 0) || !(require_finite(hbar, "hbar") > 0))
        throw InvalidParameter("omega0 and hbar must be positive");
    return 2.0 / ((2 * n + 1) * pi) * omega0 / hbar;
}

class Scenario1Params {
public:
    Scenario1Params(double c, double omega0, double xi, double x = 0.0, double hbar = 1.0,
                    TimeFunction Omega = TimeFunction::constant(0.0))
        : Scenario1Params(std::optional<double>(c), omega0, xi, x, hbar, std::move(Omega))
    {
        if (!(require_finite(c, "c") != 0))
            throw InvalidParameter("c must be nonzero");
    }

    static Scenario1Params with_index(int n, double c, double omega0, double x = 0.0, double hbar = 1.0,
                                      TimeFunction Omega = TimeFunction::constant(0.0))
    {
        Scenario1Params p(c, omega0, scenario1_xi(n, c, omega0, hbar), x, hbar, std::move(Omega));
        p.n_ = n;
        return p;
    }

    static Scenario1Params resonance(double omega0, double xi, double x = 0.0, double hbar = 1.0,
                                     TimeFunction Omega = TimeFunction::constant(0.0))
    {
        return Scenario1Params(std::nullopt, omega0, xi, x, hbar, std::move(Omega));
    }

    static Scenario1Params resonance_with_index(int n, double omega0, double x = 0.0, double hbar = 1.0,
                                                TimeFunction Omega = TimeFunction::constant(0.0))
    {
        Scenario1Params p = resonance(omega0, scenario1_xi_resonance(n, omega0, hbar), x, hbar, std::move(Omega));
        p.n_ = n;
        return p;
    }

    bool resonance_limit() const { return !c_; }
    double c() const
    {
        if (!c_)
            throw InvalidParameter("c is infinite in the resonance limit");
        return *c_;
    }
    double omega0() const { return omega0_; }
    double xi() const { return xi_; }
    std::optional<int> n() const { return n_; }
    double x() const { return x_; }
    double hbar() const { return hbar_; }
    const TimeFunction& longitudinal() const { return Omega_; }

private:
    Scenario1Params(std::optional<double> c, double omega0, double xi, double x, double hbar, TimeFunction Omega)
        : c_(c), omega0_(omega0), xi_(xi), x_(x), hbar_(hbar), Omega_(std::move(Omega))
    {
        if (!(require_finite(omega0, "omega0") > 0))
            throw InvalidParameter("omega0 must be positive");
        if (!(require_finite(xi, "xi") > 0))
            throw InvalidParameter("xi must be positive");
        if (!(require_finite(x, "x") >= 0 && x < 1))
            throw InvalidParameter("x must lie in [0, 1)");
        if (!(require_finite(hbar, "hbar") > 0))
            throw InvalidParameter("hbar must be positive");
    }

    std::optional<double> c_;
    double omega0_, xi_, x_, hbar_;
    std::optional<int> n_;
    TimeFunction Omega_;
};

inline void check_time(double t)
{
    if (!(require_finite(t, "t") >= 0))
        throw InvalidParameter("t must be non-negative");
}

// (omega0 / xi)(1 - exp(-xi t))
inline double scenario1_drive_integral(const Scenario1Params& p, double t)
{
    check_time(t);
    return -p.omega0() / p.xi() * std::expm1(-p.xi() * t);
}

// Phi(t) = sqrt(hbar^2 + c^2) / (hbar c) int |omega|
inline double scenario1_Phi(const Scenario1Params& p, double t)
{
    const double k = p.resonance_limit() ? 1 / p.hbar() : std::hypot(p.hbar(), p.c()) / (p.hbar() * p.c());
    return k * scenario1_drive_integral(p, t);
}

// tan(phi) = hbar / sqrt(hbar^2 + c^2) tan(Phi), lifted to the branch continuous in Phi.
inline double scenario1_mixing_phase(const Scenario1Params& p, double t)
{
    const double Phi = scenario1_Phi(p, t);
    if (p.resonance_limit())
        return 0.0;
    const double k = std::round(Phi / pi);
    const double r = Phi - k * pi;
    return k * pi + std::atan(p.hbar() / std::hypot(p.hbar(), p.c()) * std::tan(r));
}

// phi_omega(t) = int 2 (|omega| / c - Omega / hbar)
inline double scenario1_phase(const Scenario1Params& p, double t)
{
    check_time(t);
    const double longitudinal = -2 / p.hbar() * p.longitudinal().integral(0.0, t);
    if (p.resonance_limit())
        return longitudinal;
    return 2 * scenario1_drive_integral(p, t) / p.c() + longitudinal;
}

inline ClosedForms scenario1_closed_forms(const Scenario1Params& p, double t)
{
    const double Phi = scenario1_Phi(p, t);
    const double x = p.x(), q2 = 1 - x * x;
    const double s = std::sin(Phi), c = std::cos(Phi);
    if (p.resonance_limit())
        return {c * c, s * s, c * c * x * x + s * s * q2};
    const double hb = p.hbar(), cc = p.c();
    const double w = cc * cc / (hb * hb + cc * cc);
    const double a2 = 1 - w * s * s, b2 = w * s * s;
    const double sp = std::sin(scenario1_mixing_phase(p, t));
    return {a2, b2, a2 * x * x + b2 * q2 + 2 * a2 * cc * sp * sp / hb * x * std::sqrt(q2)};
}

// alpha = |alpha| exp(i(phi_omega / 2 - phi)), beta = |beta| exp(i(phi_omega / 2 - pi / 2))
inline AmplitudePair scenario1_amplitudes(const Scenario1Params& p, double t)
{
    const double Phi = scenario1_Phi(p, t);
    const double half = 0.5 * scenario1_phase(p, t);
    if (p.resonance_limit())
        return AmplitudePair(std::cos(Phi) * std::polar(1.0, half), std::sin(Phi) * std::polar(1.0, half - pi / 2));
    const double hb = p.hbar(), cc = p.c(), root = std::hypot(hb, cc);
    const double cP = std::cos(Phi), sP = std::sin(Phi);
    const double mod_a = std::sqrt(hb * hb + cc * cc * cP * cP) / root;
    const cplx alpha = std::polar(mod_a, half - scenario1_mixing_phase(p, t));
    const cplx beta = std::polar(1.0, half - pi / 2) * (cc / root * sP);
    return AmplitudePair(alpha, beta);
}

inline FieldConfig scenario1_fields(const Scenario1Params& p)
{
    auto phase = TimeFunction::callable([p](double t) { return scenario1_phase(p, t); },
                                        [p](double t) {
                                            const double l = -2 / p.hbar() * p.longitudinal()(t);
                                            if (p.resonance_limit())
                                                return l;
                                            return 2 * p.omega0() * std::exp(-p.xi() * t) / p.c() + l;
                                        },
                                        0.0);
    return FieldConfig(p.longitudinal(), TimeFunction::exponential(p.omega0(), -p.xi()), std::move(phase), p.hbar());
}

// SinPhase auxiliary function of a finite-c scenario.
inline AuxiliaryFunction scenario1_aux(const Scenario1Params& p)
{
    if (p.resonance_limit())
        throw InvalidParameter("no auxiliary function in the resonance limit");
    auto phi = TimeFunction::callable([p](double t) { return scenario1_mixing_phase(p, t); },
                                      [p](double t) {
                                          const double hb = p.hbar(), c = p.c();
                                          const double s = std::sin(scenario1_mixing_phase(p, t));
                                          return p.omega0() * std::exp(-p.xi() * t) * (hb * hb + c * c * s * s)
                                               / (hb * hb * c);
                                      },
                                      0.0);
    return AuxiliaryFunction(SinPhase{p.c(), std::move(phi)}, p.hbar());
}

// ---------------------------------------------------------------------------
// Scenario 2: |omega| = omega0 exp(-xi t), cos(Theta) = sech^2(xi t), X = A exp(i phi)
// with A = hbar tan(u), u = (1 / hbar) int |omega| cos(Theta).

// xi = (4 / pi)(omega0 / hbar)(pi / 4 - 1 / 2): the running angle u tends to pi / 2.
inline double scenario2_xi(double omega0, double hbar = 1.0)
{
    if (!(require_finite(omega0, "omega0") > 0) || !(require_finite(hbar, "hbar") > 0))
        throw InvalidParameter("omega0 and hbar must be positive");
    return 4 / pi * omega0 / hbar * (pi / 4 - 0.5);
}

inline double scenario2_omega0(double xi, double hbar = 1.0)
{
    if (!(require_finite(xi, "xi") > 0) || !(require_finite(hbar, "hbar") > 0))
        throw InvalidParameter("xi and hbar must be positive");
    return pi * xi * hbar / (pi - 2);
}

class Scenario2Params {
public:
    Scenario2Params(double omega0, double xi, double x = 0.0, double hbar = 1.0,
                    TimeFunction phi_omega = TimeFunction::constant(0.0))
        : omega0_(omega0), xi_(xi), x_(x), hbar_(hbar), phi_omega_(std::move(phi_omega))
    {
        if (!(require_finite(omega0, "omega0") > 0))
            throw InvalidParameter("omega0 must be positive");
        if (!(require_finite(xi, "xi") > 0))
            throw InvalidParameter("xi must be positive");
        if (!(require_finite(x, "x") >= 0 && x < 1))
            throw InvalidParameter("x must lie in [0, 1)");
        if (!(require_finite(hbar, "hbar") > 0))
            throw InvalidParameter("hbar must be positive");
    }

    // omega0 chosen so that |beta|^2 -> 1.
    static Scenario2Params converging(double xi, double x = 0.0, double hbar = 1.0,
                                      TimeFunction phi_omega = TimeFunction::constant(0.0))
    {
        return Scenario2Params(scenario2_omega0(xi, hbar), xi, x, hbar, std::move(phi_omega));
    }

    double omega0() const { return omega0_; }
    double xi() const { return xi_; }
    double x() const { return x_; }
    double hbar() const { return hbar_; }
    const TimeFunction& phi_omega() const { return phi_omega_; }

    // limit of 2u as t -> infinity
    double two_u_limit() const { return 4 * omega0_ / (hbar_ * xi_) * (pi / 4 - 0.5); }

private:
    double omega0_, xi_, x_, hbar_;
    TimeFunction phi_omega_;
};

inline double scenario2_theta(double xi, double t)
{
    check_time(t);
    const double y = xi * t, s2 = 1 / (std::cosh(y) * std::cosh(y));
    return std::atan2(std::tanh(y) * std::sqrt(1 + s2), s2);
}

inline double scenario2_theta_rate(double xi, double t)
{
    check_time(t);
    const double s2 = 1 / (std::cosh(xi * t) * std::cosh(xi * t));
    return 2 * xi * s2 / std::sqrt(1 + s2);
}

struct RunningAngle {
    double two_u, sin_two_u, cos_two_u;
    double u() const { return 0.5 * two_u; }
};

// 2u(t) with its sine and cosine. Past xi t = 1 the angle is formed as
// limit - deficit, the deficit summed as a series in exp(-xi t).
inline RunningAngle scenario2_angle(const Scenario2Params& p, double t)
{
    check_time(t);
    const double y = p.xi() * t;
    const double K = 4 * p.omega0() / (p.hbar() * p.xi());
    if (y <= 1) {
        const double sh = std::sinh(0.5 * y);
        const double two_u = K * (std::atan(std::tanh(0.5 * y)) - sh * sh / std::cosh(y));
        return {two_u, std::sin(two_u), std::cos(two_u)};
    }
    // atan(z) - z / (1 + z^2) = sum_k (-1)^(k+1) (2k / (2k+1)) z^(2k+1)
    const double z = std::exp(-y), z2 = z * z;
    double tail = 0, term = z;
    for (int k = 1; k < 40; ++k) {
        term *= -z2;
        const double add = -term * (2.0 * k) / (2.0 * k + 1);
        tail += add;
        if (std::abs(add) <= 1e-18 * std::abs(tail))
            break;
    }
    const double U = p.two_u_limit(), d = K * tail;
    const double sU = std::sin(U), cU = std::cos(U), sd = std::sin(d), cd = std::cos(d);
    return {U - d, sU * cd - cU * sd, cU * cd + sU * sd};
}

inline double scenario2_u(const Scenario2Params& p, double t) { return scenario2_angle(p, t).u(); }

// (2 |omega| / hbar) sin(Theta) / sin(2u), the rate of the mixing phase phi.
inline double scenario2_mixing_rate(const Scenario2Params& p, double t)
{
    check_time(t);
    const double y = p.xi() * t;
    if (y == 0)
        return std::numbers::sqrt2 * p.xi();
    const double s2 = 1 / (std::cosh(y) * std::cosh(y));
    const double sin_theta = std::tanh(y) * std::sqrt(1 + s2);
    return 2 * p.omega0() * std::exp(-y) / p.hbar() * sin_theta / scenario2_angle(p, t).sin_two_u;
}

inline double scenario2_longitudinal(const Scenario2Params& p, double t)
{
    check_time(t);
    const double hb = p.hbar(), xi = p.xi();
    const double drift = 0.5 * hb * (scenario2_theta_rate(xi, t) - p.phi_omega().derivative(t));
    if (t == 0)
        return drift + std::numbers::sqrt2 * xi * hb / 2;
    const auto a = scenario2_angle(p, t);
    const double k = std::round(a.two_u / pi);
    if (k >= 1 && std::abs(a.two_u - k * pi) < 1e-6) {
        // Approaching the asymptote 2u -> k pi is not a crossing: the field stays finite at every t.
        const bool asymptote = std::abs(p.two_u_limit() - k * pi) <= 1e-12 * k * pi;
        if (!asymptote)
            throw LongitudinalSingularity("cot argument within 1e-6 of " + std::to_string(static_cast<int>(k))
                                          + " pi at t = " + std::to_string(t));
    }
    const double y = xi * t, s2 = 1 / (std::cosh(y) * std::cosh(y));
    const double sin_theta = std::tanh(y) * std::sqrt(1 + s2);
    return drift + p.omega0() * std::exp(-y) * sin_theta * a.cos_two_u / a.sin_two_u;
}

// Context caching the running mixing phase phi(t) = int (2 |omega| / hbar) sin(Theta) / sin(2u).
class Scenario2Context {
public:
    explicit Scenario2Context(Scenario2Params p) : p_(std::move(p)) {}

    const Scenario2Params& params() const { return p_; }

    double mixing_phase(double t)
    {
        check_time(t);
        auto it = std::prev(cache_.upper_bound(t));
        if (it->first == t)
            return it->second;
        const double v = it->second
                       + integrate([this](double s) { return scenario2_mixing_rate(p_, s); }, it->first, t, 1e-11, 1e-13);
        cache_.emplace(t, v);
        return v;
    }

    ClosedForms closed_forms(double t)
    {
        const auto a = scenario2_angle(p_, t);
        const double b2 = 0.5 * (1 - a.cos_two_u), a2 = 0.5 * (1 + a.cos_two_u);
        const double x = p_.x(), q = std::sqrt(1 - x * x);
        double p_target = a2 * x * x + b2 * q * q;
        if (x > 0)
            p_target += a.sin_two_u * std::sin(mixing_phase(t)) * x * q;
        return {a2, b2, p_target};
    }

    // alpha = cos(u) exp(-i (Theta - phi_omega + phi) / 2), beta = -i tan(u) exp(i phi) alpha
    AmplitudePair amplitudes(double t)
    {
        const double u = scenario2_u(p_, t), ph = mixing_phase(t);
        const double chi = 0.5 * (scenario2_theta(p_.xi(), t) - (p_.phi_omega()(t) - p_.phi_omega()(0.0)) + ph);
        const cplx alpha = std::polar(std::cos(u), -chi);
        const cplx beta = std::polar(std::sin(u), ph - chi - pi / 2);
        return AmplitudePair(alpha, beta);
    }

private:
    Scenario2Params p_;
    std::map<double, double> cache_{{0.0, 0.0}};
};

inline ClosedForms scenario2_closed_forms(const Scenario2Params& p, double t) { return Scenario2Context(p).closed_forms(t); }

inline double scenario2_mixing_phase(const Scenario2Params& p, double t) { return Scenario2Context(p).mixing_phase(t); }

inline AmplitudePair scenario2_amplitudes(const Scenario2Params& p, double t) { return Scenario2Context(p).amplitudes(t); }

inline TimeFunction scenario2_longitudinal_function(const Scenario2Params& p)
{
    return TimeFunction::callable([p](double t) { return scenario2_longitudinal(p, t); },
                                  [p](double t) {
                                      const double h = 1e-6 * std::max(1.0, t);
                                      const double lo = std::max(0.0, t - h);
                                      return (scenario2_longitudinal(p, t + h) - scenario2_longitudinal(p, lo))
                                           / (t + h - lo);
                                  },
                                  0.0);
}

inline FieldConfig scenario2_fields(const Scenario2Params& p)
{
    return FieldConfig(scenario2_longitudinal_function(p), TimeFunction::exponential(p.omega0(), -p.xi()),
                       p.phi_omega(), p.hbar());
}

// AmpPhase auxiliary function; phi is integrated afresh on every evaluation.
inline AuxiliaryFunction scenario2_aux(const Scenario2Params& p)
{
    auto A = TimeFunction::callable([p](double t) { return p.hbar() * std::tan(scenario2_u(p, t)); },
                                    [p](double t) {
                                        const double c = std::cos(scenario2_u(p, t));
                                        const double s2 = 1 / (std::cosh(p.xi() * t) * std::cosh(p.xi() * t));
                                        return p.omega0() * std::exp(-p.xi() * t) * s2 / (c * c);
                                    },
                                    0.0);
    auto phi = TimeFunction::callable([p](double t) { return scenario2_mixing_phase(p, t); },
                                      [p](double t) { return scenario2_mixing_rate(p, t); }, 0.0);
    return AuxiliaryFunction(AmpPhase{std::move(A), std::move(phi)}, p.hbar());
}

} // namespace qsd::inverse
