#pragma once

#include <numbers>

#include "core.hpp"

// Rabi two-level model: free levels E1 < E2 coupled by V12 = Gamma exp(i omega t).
// Amplitudes are interaction-picture coefficients c1 (|E1>) and c2 (|E2>).
namespace qsd::rabi {

class RabiParams {
public:
    RabiParams(double E1, double E2, double Gamma, double omega_drive, double x, double hbar = 1.0)
        : RabiParams(E1, E2, Gamma, x, hbar, 0.0, 0)
    {
        if (!(require_finite(omega_drive, "omega_drive") >= 0))
            throw InvalidParameter("drive frequency must be non-negative");
        detuning_ = omega_drive - omega21();
    }

    // Build from the detuning omega - omega21 directly.
    static RabiParams from_detuning(double E1, double E2, double Gamma, double detuning, double x, double hbar = 1.0)
    {
        RabiParams p(E1, E2, Gamma, x, hbar, require_finite(detuning, "detuning"), 0);
        if (p.omega_drive() < 0)
            throw InvalidParameter("detuning implies a negative drive frequency");
        return p;
    }

    double E1() const { return E1_; }
    double E2() const { return E2_; }
    double Gamma() const { return Gamma_; }
    double x() const { return x_; }
    double hbar() const { return hbar_; }
    double omega21() const { return (E2_ - E1_) / hbar_; }
    double detuning() const { return detuning_; }
    double omega_drive() const { return omega21() + detuning_; }

    double generalized_frequency() const
    {
        const double g = Gamma_ / hbar_;
        return std::sqrt(g * g + 0.25 * detuning_ * detuning_);
    }

private:
    RabiParams(double E1, double E2, double Gamma, double x, double hbar, double detuning, int)
        : E1_(E1), E2_(E2), Gamma_(Gamma), x_(x), hbar_(hbar), detuning_(detuning)
    {
        require_finite(E1, "E1");
        require_finite(E2, "E2");
        if (!(E2 > E1))
            throw InvalidParameter("E2 must exceed E1");
        if (!(require_finite(Gamma, "Gamma") > 0))
            throw InvalidParameter("Gamma must be positive");
        if (!(require_finite(x, "x") >= 0 && x < 1))
            throw InvalidParameter("x must lie in [0, 1)");
        if (!(require_finite(hbar, "hbar") > 0))
            throw InvalidParameter("hbar must be positive");
    }

    double E1_, E2_, Gamma_, x_, hbar_, detuning_;
};

inline Mat2 interaction_picture_matrix(const RabiParams& p, double t)
{
    const cplx ph = std::polar(1.0, p.detuning() * t);
    return {0.0, p.Gamma() * ph, p.Gamma() * std::conj(ph), 0.0};
}

inline Mat2 schrodinger_matrix(const RabiParams& p, double t)
{
    const cplx ph = std::polar(1.0, p.omega_drive() * t);
    return {p.E1(), p.Gamma() * ph, p.Gamma() * std::conj(ph), p.E2()};
}

namespace detail {
// Real part of -i D, i.e. D = i K.
inline double K(const RabiParams& p)
{
    const double q = std::sqrt(1 - p.x() * p.x());
    return (0.5 * p.detuning() * p.x() - p.Gamma() * q / p.hbar()) / p.generalized_frequency();
}
} // namespace detail

struct Amplitudes {
    cplx c1, c2;
};

// Interaction-picture amplitudes from c1(0) = sqrt(1 - x^2), c2(0) = x.
inline Amplitudes amplitudes(const RabiParams& p, double t)
{
    const double W = p.generalized_frequency(), dl = p.detuning(), x = p.x();
    const cplx D = I * detail::K(p);
    const double c = std::cos(W * t), s = std::sin(W * t);
    const cplx c2 = std::polar(1.0, -0.5 * dl * t) * (x * c + D * s);
    const cplx c1 = (I * p.hbar() / p.Gamma()) * std::polar(1.0, 0.5 * dl * t)
                  * ((W * D - 0.5 * I * dl * x) * c - (W * x + 0.5 * I * dl * D) * s);
    return {c1, c2};
}

struct Probabilities {
    double p1, p2;
};

inline Probabilities transition_probabilities(const RabiParams& p, double t)
{
    if (!(require_finite(t, "t") >= 0))
        throw InvalidParameter("t must be non-negative");
    const double W = p.generalized_frequency(), x = p.x(), K = detail::K(p);
    const double c = std::cos(W * t), s = std::sin(W * t);
    return {(1 - x * x) * c * c + (1 - K * K) * s * s, x * x * c * c + K * K * s * s};
}

// Time of the first maximum of p2 from x = 0 at resonance.
inline double resonant_search_time(double Gamma, double hbar = 1.0) { return std::numbers::pi * hbar / (2 * Gamma); }

class MagneticFieldSpec {
public:
    // B(t) = (B1 cos wt, B1 sin wt, B0). Zero field components are accepted for limiting cases.
    MagneticFieldSpec(double B0, double B1, double omega_drive, double magneton = 1.0)
        : B0_(B0), B1_(B1), omega_(omega_drive), magneton_(magneton)
    {
        if (!(require_finite(B0, "B0") >= 0) || !(require_finite(B1, "B1") >= 0))
            throw InvalidParameter("field magnitudes must be non-negative");
        if (!(require_finite(omega_drive, "omega_drive") > 0))
            throw InvalidParameter("drive frequency must be positive");
        if (!(require_finite(magneton, "magneton") > 0))
            throw InvalidParameter("magneton must be positive");
    }

    double B0() const { return B0_; }
    double B1() const { return B1_; }
    double omega_drive() const { return omega_; }
    double magneton() const { return magneton_; }

    // H(t) = magneton sigma . B(t)
    Mat2 hamiltonian(double t) const
    {
        const double wt = omega_ * t;
        return bloch_compose(0.0, {magneton_ * B1_ * std::cos(wt), magneton_ * B1_ * std::sin(wt), magneton_ * B0_});
    }

    double energy_gap() const { return 2 * magneton_ * B0_; }
    double interaction_strength() const { return magneton_ * B1_; }

private:
    double B0_, B1_, omega_, magneton_;
};

inline RabiParams field_to_rabi(const MagneticFieldSpec& m, double x = 0.0, double hbar = 1.0)
{
    const double e = m.magneton() * m.B0();
    return RabiParams(-e, e, m.interaction_strength(), m.omega_drive(), x, hbar);
}

inline double overlap_from_fields(double B0, double B1)
{
    if (!(require_finite(B0, "B0") >= 0) || !(require_finite(B1, "B1") > 0))
        throw InvalidParameter("need B0 >= 0 and B1 > 0");
    const double r = B0 / B1;
    return r / std::sqrt(1 + r * r);
}

struct FgSplit {
    double E1, E2, Gamma, omega;
};

inline FgSplit fg_decomposition(double E, double x)
{
    if (!(require_finite(E, "E") > 0))
        throw InvalidParameter("E must be positive");
    if (!(require_finite(x, "x") > 0 && x < 1))
        throw InvalidParameter("x must lie in (0, 1)");
    return {E * (1 - x * x), E * (1 + x * x), E * x * std::sqrt(1 - x * x), 0.0};
}

inline double noncommutativity_witness(const MagneticFieldSpec& m, double t1, double t2)
{
    return commutator(m.hamiltonian(t1), m.hamiltonian(t2)).frobenius();
}

} // namespace qsd::rabi
