#pragma once

#include "core.hpp"
#include "time_function.hpp"

namespace qsd {

// su(2) driving field: H(t) = [[Omega, omega], [conj(omega), -Omega]],
// omega = |omega| exp(i phi_omega).
class FieldConfig {
public:
    FieldConfig(TimeFunction longitudinal, TimeFunction transverse_magnitude,
                TimeFunction transverse_phase = TimeFunction::constant(0.0), double hbar = 1.0)
        : longitudinal_(std::move(longitudinal)), magnitude_(std::move(transverse_magnitude)),
          phase_(std::move(transverse_phase)), hbar_(hbar)
    {
        if (!(require_finite(hbar_, "hbar") > 0))
            throw InvalidParameter("hbar must be positive");
    }

    double longitudinal(double t) const { return longitudinal_(t); }

    double transverse_magnitude(double t) const
    {
        const double m = magnitude_(t);
        if (m < 0)
            throw InvalidParameter("transverse magnitude is negative at t = " + std::to_string(t));
        return m;
    }

    double transverse_phase(double t) const { return phase_(t); }
    cplx transverse(double t) const { return std::polar(transverse_magnitude(t), transverse_phase(t)); }

    Mat2 matrix(double t) const
    {
        const double om = longitudinal(t);
        const cplx w = transverse(t);
        return {om, w, std::conj(w), -om};
    }

    const TimeFunction& longitudinal_function() const { return longitudinal_; }
    const TimeFunction& magnitude_function() const { return magnitude_; }
    const TimeFunction& phase_function() const { return phase_; }
    double hbar() const { return hbar_; }

private:
    TimeFunction longitudinal_, magnitude_, phase_;
    double hbar_;
};

struct AxisForm {
    double omega_H = 0.0;
    Vec3 n_hat{};
};

inline AxisForm hamiltonian_axis_form(const FieldConfig& f, double t)
{
    const double om = f.longitudinal(t);
    const double mag = f.transverse_magnitude(t);
    const double ph = f.transverse_phase(t);
    const double omega_H = 2 * std::hypot(mag, om);
    if (omega_H == 0.0)
        throw ZeroField("field vanishes at t = " + std::to_string(t));
    return {omega_H, {2 * mag * std::cos(ph) / omega_H, -2 * mag * std::sin(ph) / omega_H, 2 * om / omega_H}};
}

// Inverse of hamiltonian_axis_form: (Omega_H / 2) n_hat . sigma.
inline Mat2 axis_form_matrix(const AxisForm& a)
{
    const double r = a.omega_H / 2;
    return bloch_compose(0.0, {r * a.n_hat[0], r * a.n_hat[1], r * a.n_hat[2]});
}

} // namespace qsd
