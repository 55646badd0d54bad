#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace qsd {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr cplx I{0.0, 1.0};

inline cplx require_finite(cplx v, const char* what)
{
    require_finite(v.real(), what);
    require_finite(v.imag(), what);
    return v;
}

// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    cplx m11{}, m12{}, m21{}, m22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(cplx a, cplx b) { return {a, 0.0, 0.0, b}; }

    Mat2 adjoint() const { return {std::conj(m11), std::conj(m21), std::conj(m12), std::conj(m22)}; }
    cplx trace() const { return m11 + m22; }
    cplx det() const { return m11 * m22 - m12 * m21; }

    double frobenius() const
    {
        return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
    }

    friend Mat2 operator+(const Mat2& a, const Mat2& b)
    {
        return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b)
    {
        return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
    }
    friend Mat2 operator*(cplx s, const Mat2& a) { return {s * a.m11, s * a.m12, s * a.m21, s * a.m22}; }
    friend Mat2 operator*(const Mat2& a, const Mat2& b)
    {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
};

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

inline const Mat2 sigma_x{0.0, 1.0, 1.0, 0.0};
inline const Mat2 sigma_y{0.0, -I, I, 0.0};
inline const Mat2 sigma_z{1.0, 0.0, 0.0, -1.0};

inline bool is_hermitian(const Mat2& h, double tol = 1e-12)
{
    const double scale = std::max(1.0, h.frobenius());
    return std::abs(h.m11.imag()) <= tol * scale && std::abs(h.m22.imag()) <= tol * scale
        && std::abs(h.m12 - std::conj(h.m21)) <= tol * scale;
}

// Two complex amplitudes of a two-level state. Depending on context these are
// the state components (c1, c2) or the first row (alpha, beta) of an su(2)
// evolution operator [[alpha, beta], [-conj(beta), conj(alpha)]].
class AmplitudePair {
public:
    static constexpr double norm_tolerance = 1e-9;

    AmplitudePair() : alpha_(1.0), beta_(0.0) {}

    AmplitudePair(cplx alpha, cplx beta) : alpha_(alpha), beta_(beta)
    {
        check_finite();
        if (std::abs(norm() - 1.0) > norm_tolerance)
            throw InvalidParameter("amplitude pair is not normalized");
    }

    // Finite-checked only; used for propagated states whose drift is reported separately.
    static AmplitudePair unnormalized(cplx alpha, cplx beta)
    {
        AmplitudePair p;
        p.alpha_ = alpha;
        p.beta_ = beta;
        p.check_finite();
        return p;
    }

    cplx alpha() const { return alpha_; }
    cplx beta() const { return beta_; }
    cplx operator[](std::size_t k) const { return k == 0 ? alpha_ : beta_; }
    double norm() const { return std::norm(alpha_) + std::norm(beta_); }

private:
    void check_finite() const
    {
        require_finite(alpha_, "alpha");
        require_finite(beta_, "beta");
    }

    cplx alpha_, beta_;
};

struct PhysicalConstants {
    double hbar = 1.0;
    double bohr_magneton = 1.0;

    static PhysicalConstants natural() { return {}; }
    // eV*s and eV/gauss.
    static PhysicalConstants electron_volt_gauss() { return {6.582119569e-16, 5.7883818060e-9}; }

    void validate() const
    {
        if (!(require_finite(hbar, "hbar") > 0) || !(require_finite(bohr_magneton, "bohr_magneton") > 0))
            throw InvalidParameter("physical constants must be positive");
    }
};

struct BlochForm {
    double a = 0.0;
    Vec3 b{};
};

inline BlochForm bloch_decompose(const Mat2& h)
{
    if (!is_hermitian(h))
        throw NonHermitianInput("matrix is not Hermitian within 1e-12");
    const double h11 = h.m11.real(), h22 = h.m22.real();
    return {0.5 * (h11 + h22), {h.m12.real(), -h.m12.imag(), 0.5 * (h11 - h22)}};
}

inline Mat2 bloch_compose(double a, const Vec3& b)
{
    return {a + b[2], cplx(b[0], -b[1]), cplx(b[0], b[1]), a - b[2]};
}

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Eigen-decomposition of a 2x2 Hermitian matrix; lower eigenvalue first.
struct HermitianEigen {
    double lambda0 = 0.0, lambda1 = 0.0;
    std::array<cplx, 2> v0{}, v1{};
};

inline HermitianEigen hermitian_eigen(const Mat2& h)
{
    const BlochForm f = bloch_decompose(h);
    const double r = norm3(f.b);
    HermitianEigen e;
    e.lambda0 = f.a - r;
    e.lambda1 = f.a + r;
    if (r == 0.0) {
        e.v0 = {1.0, 0.0};
        e.v1 = {0.0, 1.0};
        return e;
    }
    // Spinor along +n and -n, with n = b/r in polar angles (theta, phi).
    const double nz = std::clamp(f.b[2] / r, -1.0, 1.0);
    const double theta = std::acos(nz);
    const double phi = std::atan2(f.b[1], f.b[0]);
    const cplx ph = std::polar(1.0, phi);
    e.v1 = {std::cos(theta / 2), ph * std::sin(theta / 2)};
    e.v0 = {-std::sin(theta / 2), ph * std::cos(theta / 2)};
    return e;
}

} // namespace qsd
