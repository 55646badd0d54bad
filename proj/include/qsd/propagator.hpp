#pragma once

#include <functional>
#include <limits>
#include <map>
#include <variant>
#include <vector>

#include "field.hpp"
#include "ode.hpp"
#include "trace.hpp"

namespace qsd {

using MatrixFunction = std::function<Mat2(double)>;

struct PropagationOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    // FieldConfig sources only: factor out exp(-i int Omega / hbar) analytically.
    bool rotating_frame = false;

    OdeOptions ode() const { return {rel_tol, abs_tol, max_step}; }
};

// Schroedinger-picture state propagation, i hbar psi' = H(t) psi.
struct PropagationProblem {
    std::variant<FieldConfig, MatrixFunction> hamiltonian;
    AmplitudePair initial;
    std::vector<double> times;
    double hbar = 1.0; // used by MatrixFunction sources
    std::size_t target_index = 0;
    PropagationOptions options{};
};

struct PropagationResult {
    TransitionTrace trace;
    std::vector<AmplitudePair> states;
    AmplitudePair final_state;
    double max_norm_drift = 0.0;
    OdeStats stats;

    bool norm_within(double tol) const { return max_norm_drift <= tol; }
};

namespace detail {

using State4 = std::array<double, 4>;
using State5 = std::array<double, 5>;

inline cplx c0(const auto& y) { return {y[0], y[1]}; }
inline cplx c1(const auto& y) { return {y[2], y[3]}; }

inline double norm_of(const auto& y) { return y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]; }

inline void check_times(const std::vector<double>& times)
{
    if (times.size() < 2)
        throw InvalidParameter("propagation needs at least two sample times");
    for (double t : times)
        require_finite(t, "sample time");
}

inline Mat2 checked(const Mat2& h, double t)
{
    if (!is_hermitian(h))
        throw NonHermitianField("Hamiltonian is not Hermitian at t = " + std::to_string(t));
    return h;
}

} // namespace detail

inline PropagationResult propagate(const PropagationProblem& p)
{
    using namespace detail;
    check_times(p.times);
    if (p.target_index > 1)
        throw InvalidParameter("target index must be 0 or 1");
    if (!(require_finite(p.hbar, "hbar") > 0))
        throw InvalidParameter("hbar must be positive");

    PropagationResult r;
    const double n0 = p.initial.norm();
    const std::size_t tgt = p.target_index;

    auto record = [&](double t, cplx a, cplx b) {
        const double pa = std::norm(a), pb = std::norm(b);
        r.trace.push_back(t, tgt == 0 ? pa : pb, tgt == 0 ? pb : pa, pa + pb - n0);
        r.states.push_back(AmplitudePair::unnormalized(a, b));
    };
    auto track = [&](double, const auto& y) { r.max_norm_drift = std::max(r.max_norm_drift, std::abs(norm_of(y) - n0)); };

    const auto* field = std::get_if<FieldConfig>(&p.hamiltonian);
    if (field && p.options.rotating_frame) {
        // psi1 = a exp(-i theta), psi2 = b exp(i theta), theta' = Omega / hbar.
        const double hb = field->hbar();
        auto rhs = [&](double t, const State5& y) {
            const cplx w = field->transverse(t) * std::polar(1.0, 2 * y[4]);
            const cplx a = c0(y), b = c1(y);
            const cplx da = -I / hb * (w * b), db = -I / hb * (std::conj(w) * a);
            return State5{da.real(), da.imag(), db.real(), db.imag(), field->longitudinal(t) / hb};
        };
        State5 y0{p.initial.alpha().real(), p.initial.alpha().imag(), p.initial.beta().real(),
                  p.initial.beta().imag(), 0.0};
        r.stats = dormand_prince<5>(
            rhs, y0, p.times, p.options.ode(),
            [&](std::size_t, double t, const State5& y) {
                const cplx ph = std::polar(1.0, -y[4]);
                record(t, c0(y) * ph, c1(y) * std::conj(ph));
            },
            track);
    } else {
        MatrixFunction h;
        double hb = p.hbar;
        if (field) {
            h = [field](double t) { return field->matrix(t); };
            hb = field->hbar();
        } else {
            h = std::get<MatrixFunction>(p.hamiltonian);
            if (!h)
                throw InvalidParameter("empty Hamiltonian function");
        }
        auto rhs = [&](double t, const State4& y) {
            const Mat2 m = checked(h(t), t);
            const cplx a = c0(y), b = c1(y);
            const cplx da = -I / hb * (m.m11 * a + m.m12 * b);
            const cplx db = -I / hb * (m.m21 * a + m.m22 * b);
            return State4{da.real(), da.imag(), db.real(), db.imag()};
        };
        State4 y0{p.initial.alpha().real(), p.initial.alpha().imag(), p.initial.beta().real(), p.initial.beta().imag()};
        r.stats = dormand_prince<4>(
            rhs, y0, p.times, p.options.ode(), [&](std::size_t, double t, const State4& y) { record(t, c0(y), c1(y)); },
            track);
    }
    r.final_state = r.states.back();
    return r;
}

// Evolution-operator amplitudes U = [[alpha, beta], [-conj(beta), conj(alpha)]]
// from alpha = 1, beta = 0, integrating
//   i hbar alpha' = Omega alpha - omega conj(beta),
//   i hbar beta'  = omega conj(alpha) + Omega beta.
// The trace reports |<w|U|s>|^2 and |<r|U|s>|^2 for <w|s> = x.
struct EvolutionResult {
    std::vector<double> times;
    std::vector<AmplitudePair> amplitudes;
    TransitionTrace trace;
    double max_norm_drift = 0.0;
    OdeStats stats;
};

inline EvolutionResult propagate_evolution(const FieldConfig& field, const std::vector<double>& times, double x = 0.0,
                                           const PropagationOptions& opt = {})
{
    using namespace detail;
    check_times(times);
    if (!(require_finite(x, "x") >= 0 && x <= 1))
        throw InvalidParameter("overlap x must lie in [0, 1]");
    const double q = std::sqrt(1 - x * x);
    const double hb = field.hbar();

    EvolutionResult r;
    r.times = times;
    auto record = [&](double t, cplx al, cplx be) {
        const double pw = std::norm(al * x + be * q);
        const double pr = std::norm(-std::conj(be) * x + std::conj(al) * q);
        r.trace.push_back(t, pw, pr, std::norm(al) + std::norm(be) - 1);
        r.amplitudes.push_back(AmplitudePair::unnormalized(al, be));
    };
    auto track = [&](double, const auto& y) { r.max_norm_drift = std::max(r.max_norm_drift, std::abs(norm_of(y) - 1)); };

    if (opt.rotating_frame) {
        // alpha = a exp(-i theta), beta = b exp(-i theta), theta' = Omega / hbar.
        auto rhs = [&](double t, const State5& y) {
            const cplx w = field.transverse(t) * std::polar(1.0, 2 * y[4]);
            const cplx a = c0(y), b = c1(y);
            const cplx da = I / hb * (w * std::conj(b));
            const cplx db = -I / hb * (w * std::conj(a));
            return State5{da.real(), da.imag(), db.real(), db.imag(), field.longitudinal(t) / hb};
        };
        r.stats = dormand_prince<5>(
            rhs, State5{1, 0, 0, 0, 0}, times, opt.ode(),
            [&](std::size_t, double t, const State5& y) {
                const cplx ph = std::polar(1.0, -y[4]);
                record(t, c0(y) * ph, c1(y) * ph);
            },
            track);
    } else {
        auto rhs = [&](double t, const State4& y) {
            const double om = field.longitudinal(t);
            const cplx w = field.transverse(t);
            const cplx al = c0(y), be = c1(y);
            const cplx da = -I / hb * (om * al - w * std::conj(be));
            const cplx db = -I / hb * (w * std::conj(al) + om * be);
            return State4{da.real(), da.imag(), db.real(), db.imag()};
        };
        r.stats = dormand_prince<4>(
            rhs, State4{1, 0, 0, 0}, times, opt.ode(),
            [&](std::size_t, double t, const State4& y) { record(t, c0(y), c1(y)); }, track);
    }
    return r;
}

// Two-level system with free energies E1, E2 (omega21 = (E2 - E1) / hbar) and a
// perturbation V whose off-diagonal element is |V12| exp(i phi12), in the
// interaction picture
//   i hbar c1' = V11 c1 + V12 exp(-i omega21 t) c2,
//   i hbar c2' = V21 exp(i omega21 t) c1 + V22 c2.
struct InteractionSpec {
    TimeFunction v11, v22, v12_magnitude, v12_phase;
    double omega21 = 0.0;
    double hbar = 1.0;
};

struct ReductionCheck {
    std::vector<double> times;
    std::vector<double> residual_c1, residual_c2;
    double max_residual_c1 = 0.0, max_residual_c2 = 0.0;
};

inline Mat2 interaction_matrix(const InteractionSpec& s, double t)
{
    const cplx v12 = std::polar(s.v12_magnitude(t), s.v12_phase(t)) * std::polar(1.0, -s.omega21 * t);
    return {s.v11(t), v12, std::conj(v12), s.v22(t)};
}

// Substitutes the propagated amplitudes into the decoupled second-order
// equations for c1 and c2, with five-point finite-difference derivatives of
// step h. Residuals are reported at grid points whose stencil lies inside the
// grid span.
inline ReductionCheck second_order_reduction_check(const InteractionSpec& s, const AmplitudePair& initial,
                                                   const std::vector<double>& grid, double h = 1e-2,
                                                   PropagationOptions opt = {1e-12, 1e-14})
{
    for (const TimeFunction* f : {&s.v11, &s.v22, &s.v12_magnitude, &s.v12_phase})
        if (f->is_tabulated())
            throw NonDifferentiableField("second-order reduction needs analytic interaction elements");
    detail::check_times(grid);
    if (!(h > 0))
        throw InvalidParameter("finite-difference step must be positive");
    const double hb = s.hbar;
    const double t0 = grid.front(), t1 = grid.back();

    std::vector<double> pts;
    std::vector<double> centers;
    for (double t : grid) {
        if (t - 2 * h < t0 || t + 2 * h > t1)
            continue;
        centers.push_back(t);
        for (int k = -2; k <= 2; ++k)
            pts.push_back(t + k * h);
    }
    pts.push_back(t0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    PropagationProblem p{MatrixFunction([&s](double t) { return interaction_matrix(s, t); }), initial, pts, hb};
    p.options = opt;
    const auto res = propagate(p);
    std::map<double, AmplitudePair> at;
    for (std::size_t k = 0; k < pts.size(); ++k)
        at.emplace(pts[k], res.states[k]);

    ReductionCheck out;
    for (double t : centers) {
        std::array<std::array<cplx, 5>, 2> c;
        for (int k = -2; k <= 2; ++k) {
            const AmplitudePair& a = at.at(t + k * h);
            c[0][k + 2] = a.alpha();
            c[1][k + 2] = a.beta();
        }
        auto d1 = [&](const std::array<cplx, 5>& v) { return (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12 * h); };
        auto d2 = [&](const std::array<cplx, 5>& v) {
            return (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12 * h * h);
        };

        const double v11 = s.v11(t), v22 = s.v22(t), dv11 = s.v11.derivative(t), dv22 = s.v22.derivative(t);
        const double mag = s.v12_magnitude(t), dmag = s.v12_magnitude.derivative(t), dph = s.v12_phase.derivative(t);
        // Logarithmic derivatives of V21 exp(i omega21 t) and V12 exp(-i omega21 t).
        cplx lw2 = 0.0, lw1 = 0.0;
        if (mag > 1e-300) {
            lw2 = cplx(dmag / mag, -dph + s.omega21);
            lw1 = cplx(dmag / mag, dph - s.omega21);
        }
        const cplx trace_term = I / hb * (v11 + v22);
        const double coupling = (v11 * v22 - mag * mag) / (hb * hb);

        const cplx r2 = d2(c[1]) - (lw2 - trace_term) * d1(c[1])
                      - (I / hb * lw2 * v22 - I / hb * dv22 + coupling) * c[1][2];
        const cplx r1 = d2(c[0]) - (lw1 - trace_term) * d1(c[0])
                      - (I / hb * lw1 * v11 - I / hb * dv11 + coupling) * c[0][2];
        out.times.push_back(t);
        out.residual_c1.push_back(std::abs(r1));
        out.residual_c2.push_back(std::abs(r2));
        out.max_residual_c1 = std::max(out.max_residual_c1, std::abs(r1));
        out.max_residual_c2 = std::max(out.max_residual_c2, std::abs(r2));
    }
    return out;
}

} // namespace qsd
