#pragma once

#include <numbers>
#include <utility>

#include "core.hpp"

// Time-independent generalized search Hamiltonian
//   H = E [alpha |w><w| + beta |w><s| + conj(beta) |s><w| + delta |s><s|]
// in the orthonormal basis {|w>, |r>} with <w|s> = x.
namespace qsd::gqs {

struct ResidualCoefficients {
    double coef_s, coef_w; // |r> = coef_s |s> + coef_w |w>
};

inline void check_overlap(double x)
{
    require_finite(x, "x");
    if (x == 0.0 || x == 1.0)
        throw DegenerateOverlap("overlap x must lie strictly inside (0, 1)");
    if (!(x > 0 && x < 1))
        throw InvalidParameter("overlap x must lie in (0, 1)");
}

inline ResidualCoefficients gram_schmidt_residual(double x)
{
    check_overlap(x);
    const double q = std::sqrt(1 - x * x);
    return {1 / q, -x / q};
}

class GqsParams {
public:
    GqsParams(double E, double alpha, cplx beta, double delta, double x, double hbar = 1.0)
        : E_(E), alpha_(alpha), beta_(beta), delta_(delta), x_(x), hbar_(hbar)
    {
        if (!(require_finite(E, "E") > 0))
            throw InvalidParameter("E must be positive");
        require_finite(alpha, "alpha");
        require_finite(beta, "beta");
        require_finite(delta, "delta");
        check_overlap(x);
        if (!(require_finite(hbar, "hbar") > 0))
            throw InvalidParameter("hbar must be positive");
    }

    double E() const { return E_; }
    double alpha() const { return alpha_; }
    cplx beta() const { return beta_; }
    cplx gamma() const { return std::conj(beta_); }
    double delta() const { return delta_; }
    double x() const { return x_; }
    double hbar() const { return hbar_; }

private:
    double E_, alpha_;
    cplx beta_;
    double delta_, x_, hbar_;
};

struct HMatrix {
    double h11 = 0.0, h22 = 0.0;
    cplx h12{};

    cplx h21() const { return std::conj(h12); }
    Mat2 matrix() const { return {h11, h12, h21(), h22}; }
    // (h11 - h22)^2 + 4 h12 h21
    double radicand() const { return (h11 - h22) * (h11 - h22) + 4 * std::norm(h12); }
};

inline HMatrix h_matrix(const GqsParams& p)
{
    const double E = p.E(), x = p.x(), q = std::sqrt(1 - x * x);
    return {E * (p.alpha() + 2 * p.beta().real() * x + p.delta() * x * x), E * p.delta() * (1 - x * x),
            E * q * (p.beta() + p.delta() * x)};
}

inline Mat2 hamiltonian(const GqsParams& p) { return h_matrix(p).matrix(); }

inline std::pair<double, double> eigenvalues(const HMatrix& h)
{
    const double root = std::sqrt(h.radicand());
    return {0.5 * (h.h11 + h.h22 - root), 0.5 * (h.h11 + h.h22 + root)};
}

struct Eigensystem {
    double lambda_minus, lambda_plus;
    cplx A, B; // eigenvectors A|w> + |r> (lambda_minus) and B|w> + |r> (lambda_plus)
};

inline Eigensystem eigensystem(const HMatrix& h)
{
    const auto [lm, lp] = eigenvalues(h);
    const double scale = std::max({1.0, std::abs(h.h11), std::abs(h.h22), std::abs(h.h12)});
    if (lp - lm <= 1e-14 * scale)
        throw DegenerateSpectrum("eigenvalues coincide");
    if (std::abs(h.h21()) < 1e-300)
        throw OffDiagonalZero("h21 vanishes; eigenvector ratios undefined");
    const double root = std::sqrt(h.radicand());
    return {lm, lp, ((h.h11 - h.h22) - root) / (2.0 * h.h21()), ((h.h11 - h.h22) + root) / (2.0 * h.h21())};
}

namespace detail {

struct Oscillation {
    double a;   // half the eigenvalue gap
    double z2;  // weight of sin^2
    double y;   // weight of sin(2 theta)
};

inline Oscillation oscillation(const GqsParams& p)
{
    const HMatrix h = h_matrix(p);
    const double x = p.x(), q = std::sqrt(1 - x * x);
    const double a = 0.5 * std::sqrt(h.radicand());
    if (a == 0.0)
        return {0.0, x * x, 0.0};
    const cplx z = (0.5 * (h.h11 - h.h22) * x + h.h12 * q) / a;
    return {a, std::norm(z), x * q * h.h12.imag() / a};
}

} // namespace detail

// |<w| exp(-i H t / hbar) |s>|^2. The sin(2 theta) term is absent for real beta.
inline double transition_probability(const GqsParams& p, double t)
{
    if (!(require_finite(t, "t") >= 0))
        throw InvalidParameter("t must be non-negative");
    const auto o = detail::oscillation(p);
    const double x = p.x();
    if (o.a == 0.0)
        return x * x;
    const double th = o.a * t / p.hbar();
    const double c = std::cos(th), s = std::sin(th);
    return x * x * c * c + o.z2 * s * s + o.y * std::sin(2 * th);
}

// exp(-i H t / hbar) |s> in the {|w>, |r>} basis.
inline AmplitudePair evolved_state(const GqsParams& p, double t)
{
    const HMatrix h = h_matrix(p);
    const double x = p.x(), q = std::sqrt(1 - x * x);
    const double mean = 0.5 * (h.h11 + h.h22), d = 0.5 * (h.h11 - h.h22);
    const double a = 0.5 * std::sqrt(h.radicand());
    const double th = a * t / p.hbar();
    const cplx phase = std::polar(1.0, -mean * t / p.hbar());
    // exp(-i th n.sigma) = cos th - i sin th (n.sigma), with (a n.sigma) = H - mean.
    const double sinc = a == 0.0 ? t / p.hbar() : std::sin(th) / a;
    const cplx w = std::cos(th) * x - I * sinc * (d * x + h.h12 * q);
    const cplx r = std::cos(th) * q - I * sinc * (h.h21() * x - d * q);
    return AmplitudePair(phase * w, phase * r);
}

struct Optimum {
    double t_star, p_max;
};

inline Optimum optimal_time_and_pmax(const GqsParams& p)
{
    const HMatrix h = h_matrix(p);
    const double rad = h.radicand();
    const double scale = std::max({1.0, h.h11 * h.h11, h.h22 * h.h22, std::norm(h.h12)});
    if (rad <= 1e-28 * scale)
        throw ZeroGap("eigenvalue gap vanishes");
    return {std::numbers::pi * p.hbar() / std::sqrt(rad), detail::oscillation(p).z2};
}

// Same quantities written directly in (alpha, beta, delta, x).
inline double gap_radicand_parametric(const GqsParams& p)
{
    const double al = p.alpha(), de = p.delta(), x = p.x(), br = p.beta().real(), b2 = std::norm(p.beta());
    return 4 * (al * de + br * br - b2) * x * x + 4 * br * (al + de) * x + (al - de) * (al - de) + 4 * b2;
}

inline Optimum optimal_time_and_pmax_parametric(const GqsParams& p)
{
    const double al = p.alpha(), de = p.delta(), x = p.x(), br = p.beta().real(), b2 = std::norm(p.beta());
    const double den = gap_radicand_parametric(p);
    if (!(den > 0))
        throw ZeroGap("eigenvalue gap vanishes");
    const double bi2 = b2 - br * br;
    const double num = 4 * bi2 * x * x * x * x + ((al + de) * (al + de) - 8 * bi2) * x * x
                     + 4 * br * (al + de) * x + 4 * b2;
    return {std::numbers::pi * p.hbar() / (p.E() * std::sqrt(den)), num / den};
}

// First maximum of the full probability, including the sin(2 theta) term.
inline Optimum exact_peak(const GqsParams& p)
{
    const auto o = detail::oscillation(p);
    if (o.a == 0.0)
        throw ZeroGap("eigenvalue gap vanishes");
    const double x2 = p.x() * p.x();
    const double c = 0.5 * (x2 - o.z2);
    double two_theta = std::atan2(o.y, c);
    if (two_theta < 0)
        two_theta += 2 * std::numbers::pi;
    return {0.5 * two_theta * p.hbar() / o.a, 0.5 * (x2 + o.z2) + std::hypot(c, o.y)};
}

} // namespace qsd::gqs
