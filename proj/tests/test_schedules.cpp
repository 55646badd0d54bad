#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <qsd/schedules.hpp>

#include "oracle_values.hpp"

using namespace qsd;
using namespace qsd::schedules;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> pr_trace(PrVariant v, const PrParams& pr, double T, std::size_t n)
{
    const auto src = source_state(pr.x);
    PropagationProblem p{MatrixFunction([v, pr](double t) {
                             const auto fg = perez_romanelli_fields(v, pr, t);
                             return nonadiabatic_hamiltonian(fg.f, fg.g, pr.x);
                         }),
                         AmplitudePair(src[0], src[1]), linspace(0, T, n)};
    p.options = {1e-11, 1e-13};
    return propagate(p).trace.p_target();
}

// values at strict local maxima (sign = +1) or minima (sign = -1)
std::vector<double> extrema(const std::vector<double>& p, int sign)
{
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
        if (sign * (p[i] - p[i - 1]) > 0 && sign * (p[i] - p[i + 1]) > 0)
            out.push_back(p[i]);
    return out;
}

} // namespace

TEST(Adiabatic, EndpointHamiltonians)
{
    const double x = 0.3;
    auto e = hermitian_eigen(adiabatic_hamiltonian(x, 0.0));
    EXPECT_NEAR(e.lambda0, 0.0, 1e-15);
    EXPECT_NEAR(std::abs(std::abs(e.v0[0]) - x), 0.0, 1e-14);
    e = hermitian_eigen(adiabatic_hamiltonian(x, 1.0));
    EXPECT_NEAR(e.lambda0, 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.v0[0]), 1.0, 1e-14);
    EXPECT_THROW(adiabatic_hamiltonian(0.0, 0.5), InvalidParameter);
}

TEST(Adiabatic, GapIdentity)
{
    EXPECT_NEAR(spectral_gap(0.01, 0.5), 0.1, 1e-15);
    for (double x : {0.05, 0.3, 0.7}) {
        for (double s : linspace(0, 1, 101)) {
            const auto e = hermitian_eigen(adiabatic_hamiltonian(x, s));
            EXPECT_NEAR(e.lambda1 - e.lambda0, spectral_gap(x * x, s), 1e-12);
            EXPECT_GE(spectral_gap(x * x, s), x - 1e-15);
        }
        EXPECT_NEAR(spectral_gap(x * x, 0.5), x, 1e-15);
    }
}

TEST(AdiabaticSpec, Validation)
{
    EXPECT_THROW(AdiabaticSpec(0.1, 1.5, TimeFunction::linear(0, 1), 1), InvalidParameter);
    EXPECT_THROW(AdiabaticSpec(0.1, 0.1, TimeFunction::linear(0.1, 1), 0.9), InvalidParameter);
    EXPECT_THROW(AdiabaticSpec(0.1, 0.1, TimeFunction::composed("sin", {1, pi, 0}), 1), InvalidParameter);
    EXPECT_THROW(AdiabaticSpec(0.1, 0.1, TimeFunction::linear(0, 1), -1), InvalidParameter);
    const AdiabaticSpec ok(0.1, 0.1, TimeFunction::linear(0, 0.5), 2);
    EXPECT_THROW(adiabatic_hamiltonian(ok, 2.5), InvalidParameter);
}

TEST(RolandCerf, ScheduleBoundaryAndSaturation)
{
    for (double x : {0.05, 0.1, 0.3}) {
        const double eps = 0.1, T = roland_cerf_run_time(x, eps);
        EXPECT_NEAR(roland_cerf_schedule(x, eps, 0), 0.0, 1e-14);
        EXPECT_NEAR(roland_cerf_schedule(x, eps, T), 1.0, 1e-12);
        for (double t : linspace(0, T, 500)) {
            const double g = spectral_gap(x * x, roland_cerf_schedule(x, eps, t));
            EXPECT_NEAR(roland_cerf_speed(x, eps, t), eps * g * g, 1e-9);
        }
        const auto spec = roland_cerf_spec(x, eps);
        for (const auto& a : local_adiabaticity_check(spec, linspace(0, T, 50))) {
            EXPECT_NEAR(a.lhs, a.saturation, 1e-9);
            EXPECT_GT(a.rhs, 0.0);
        }
    }
}

TEST(RolandCerf, GroverLikeRunTime)
{
    const double T = roland_cerf_run_time(0.01, 1.0);
    EXPECT_NEAR(T / (pi / (2 * 0.01)), 1.0, 0.01);
    // T ~ 1 / x: halving x nearly doubles T
    EXPECT_NEAR(roland_cerf_run_time(0.001, 1.0) / roland_cerf_run_time(0.002, 1.0), 2.0, 2e-3);
}

TEST(RolandCerf, TransverseFieldBoundary)
{
    const double x = 0.2, eps = 0.1, q = std::sqrt(1 - x * x), T = roland_cerf_run_time(x, eps);
    EXPECT_NEAR(roland_cerf_transverse_field(x, eps, 0), -x * q, 1e-14);
    EXPECT_THROW(roland_cerf_transverse_field(x, eps, 1.1 * T), InvalidParameter);
}

TEST(LocalAdiabaticity, FrozenScheduleIsTriviallySatisfied)
{
    const AdiabaticSpec spec(0.2, 0.1, TimeFunction::linear(0, 0.25), 4);
    for (const auto& a : local_adiabaticity_check(spec, {0.0, 2.0, 4.0}))
        EXPECT_NEAR(a.lhs, 0.25, 1e-15);
    const AdiabaticSpec frozen(0.2, 0.1, TimeFunction::callable([](double t) { return t < 1 ? t : 1.0; },
                                                                 [](double t) { return t < 1 ? 1.0 : 0.0; }),
                               1.0);
    const auto r = local_adiabaticity_check(frozen, {1.0});
    EXPECT_EQ(r[0].lhs, 0.0);
    EXPECT_LE(r[0].lhs, r[0].rhs);
}

TEST(Classification, RunTimesMatchOracle)
{
    for (const auto& [w, T] : oracle::T_gap2)
        EXPECT_NEAR(classify_point(SpeedLaw::EpsGap2, 0.1, w, 0.1, {1e-12, 1e-14}).T, T, 1e-8 * T);
    for (const auto& [w, T] : oracle::T_gap3)
        EXPECT_NEAR(classify_point(SpeedLaw::EpsGap3, 0.1, w, 0.1, {1e-12, 1e-14}).T, T, 1e-8 * T);
    EXPECT_NEAR(classify_point(SpeedLaw::Constant, 0.1, 0.5, 0.1).T, 10.0, 1e-10);
    EXPECT_NEAR(classify_point(SpeedLaw::EpsW, 0.1, 0.5, 0.1).T, 20.0, 1e-10);
}

TEST(Classification, FinalProbabilitiesMatchOracle)
{
    for (const auto& [w, p] : oracle::p_gap2) {
        const auto r = classify_point(SpeedLaw::EpsGap2, 0.1, w, 0.1, {1e-12, 1e-14});
        EXPECT_NEAR(r.p_final, p, 1e-8);
        EXPECT_TRUE(r.satisfies_fp);
    }
    const auto c = classify_point(SpeedLaw::Constant, 0.1, 1e-3, 0.1, {1e-12, 1e-14});
    EXPECT_NEAR(c.p_final, oracle::p_const_1e3, 1e-8);
    EXPECT_FALSE(c.satisfies_fp);
}

TEST(Classification, Verdicts)
{
    const auto grid = log_grid(1e-3, 1e-1, 5);
    const auto gap2 = classify_schedule(SpeedLaw::EpsGap2, 0.1, grid);
    EXPECT_TRUE(gap2.grover_scaling);
    EXPECT_TRUE(gap2.fixed_point);
    const auto cst = classify_schedule(SpeedLaw::Constant, 0.1, grid);
    EXPECT_FALSE(cst.grover_scaling);
    EXPECT_FALSE(cst.fixed_point);
    EXPECT_NEAR(cst.slope, 0.0, 1e-12);
    const auto gap3 = classify_schedule(SpeedLaw::EpsGap3, 0.1, grid);
    EXPECT_TRUE(gap3.fixed_point);
    EXPECT_FALSE(gap3.grover_scaling);
    EXPECT_NEAR(gap3.slope, -1.0, 0.05);
}

TEST(Classification, DeterministicAcrossWorkerCounts)
{
    const auto grid = log_grid(5e-3, 0.9, 5);
    const auto a = classify_schedule(SpeedLaw::EpsGap2, 0.2, grid, {}, 1);
    const auto b = classify_schedule(SpeedLaw::EpsGap2, 0.2, grid, {}, 4);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].w, b.rows[i].w);
        EXPECT_EQ(a.rows[i].T, b.rows[i].T);
        EXPECT_EQ(a.rows[i].p_final, b.rows[i].p_final);
    }
    EXPECT_EQ(a.slope, b.slope);
}

TEST(Classification, CustomDeltaAndGridGuards)
{
    const auto grid = log_grid(1e-3, 1e-1, 5);
    const auto c = classify_schedule(SpeedLaw::EpsGap2, 0.1, grid, [](double) { return 1e-4; });
    EXPECT_FALSE(c.fixed_point);
    EXPECT_THROW(classify_schedule(SpeedLaw::EpsGap2, 0.1, log_grid(1e-3, 1e-1, 4)), GridTooSmall);
    EXPECT_THROW(classify_schedule(SpeedLaw::EpsGap2, 0.1, log_grid(1e-2, 1e-1, 5)), GridTooSmall);
    EXPECT_THROW(classify_schedule(SpeedLaw::EpsGap2, 1.5, grid), InvalidParameter);
    EXPECT_THROW(classify_schedule(SpeedLaw::EpsGap2, 0.1, {0.0, 1e-3, 1e-2, 1e-1, 0.5}), InvalidParameter);
}

TEST(PerezRomanelli, FixedPointLikeValues)
{
    PrParams p = PrParams::defaults(0.1);
    p.b = 0;
    p.c = 0;
    EXPECT_NEAR(perez_romanelli_fields(PrVariant::FixedPointLike, p, 3.0).g, 0.98, 1e-15);
    p.b = 1;
    p.c = 0.5;
    const auto fg = perez_romanelli_fields(PrVariant::FixedPointLike, p, 2.0);
    EXPECT_EQ(fg.f, 1.0);
    EXPECT_NEAR(fg.g, 0.98 + 2 * 0.1 * std::sqrt(0.99), 1e-15);
    EXPECT_NEAR(fg.g, 1.178997487421324, 1e-14);
}

TEST(PerezRomanelli, OscillatoryStartsInEigenstate)
{
    const auto p = PrParams::defaults(0.1);
    const auto fg = perez_romanelli_fields(PrVariant::Oscillatory, p, 0.0);
    const Mat2 h = nonadiabatic_hamiltonian(fg.f, fg.g, p.x);
    const auto src = source_state(p.x);
    // H(0) |s> is proportional to |s>
    const cplx h0s = h.m11 * src[0] + h.m12 * src[1], h1s = h.m21 * src[0] + h.m22 * src[1];
    EXPECT_NEAR(std::abs(h0s * src[1] - h1s * src[0]), 0.0, 1e-12);
    const auto e = hermitian_eigen(h);
    EXPECT_NEAR(e.lambda1 - e.lambda0, p.gamma_pr, 1e-10);
}

TEST(PerezRomanelli, OscillatoryVariantKeepsPeakAmplitude)
{
    const auto p = pr_trace(PrVariant::Oscillatory, PrParams::defaults(0.1), 4 * pi, 20001);
    const auto peaks = extrema(p, 1);
    ASSERT_GE(peaks.size(), 3u);
    const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end());
    EXPECT_LE(*hi - *lo, 0.05 * *hi);
}

TEST(PerezRomanelli, FixedPointLikeVariantDampsOscillation)
{
    const auto p = pr_trace(PrVariant::FixedPointLike, PrParams::defaults(0.1), 40, 20001);
    const auto peaks = extrema(p, 1), troughs = extrema(p, -1);
    const std::size_t n = std::min(peaks.size(), troughs.size());
    ASSERT_GE(n, 5u);
    for (std::size_t i = 1; i < n; ++i)
        EXPECT_LT(peaks[i] - troughs[i], peaks[i - 1] - troughs[i - 1]);
}

TEST(FieldDictionary, BoundaryValues)
{
    for (double x : {0.1, 0.3, 0.6}) {
        const double q = std::sqrt(1 - x * x);
        const auto f0 = adiabatic_field_path(x, 0), f1 = adiabatic_field_path(x, 1);
        EXPECT_NEAR(f0.omega, -x * q, 1e-15);
        EXPECT_NEAR(f0.Omega, -0.5 * (1 - 2 * x * x), 1e-15);
        EXPECT_EQ(f1.omega, 0.0);
        EXPECT_NEAR(f1.Omega, 0.5, 1e-15);
        EXPECT_NEAR(schedule_from_fields(2 * x * q / (1 - 2 * x * x), x), 0.0, 1e-14);
        EXPECT_NEAR(schedule_from_fields(0.0, x), 1.0, 1e-15);
        EXPECT_NEAR(schedule_from_fields(f0.omega / f0.Omega, x), 0.0, 1e-14);
    }
}

TEST(FieldDictionary, RoundTrip)
{
    for (double x : {0.05, 0.3, 0.55})
        for (double s : linspace(0.01, 0.99, 50)) {
            const auto f = adiabatic_field_path(x, s);
            EXPECT_NEAR(schedule_from_fields(f.omega / f.Omega, x), s, 1e-12);
        }
}

TEST(FieldDictionary, SpeedFromRateMatchesChainRule)
{
    const double x = 0.3, eps = 0.1;
    const double T = roland_cerf_run_time(x, eps);
    for (double t : {0.2 * T, 0.5 * T, 0.8 * T}) {
        const double h = 1e-6;
        auto ratio = [&](double tt) {
            const auto f = adiabatic_field_path(x, roland_cerf_schedule(x, eps, tt));
            return f.omega / f.Omega;
        };
        const double r = ratio(t), dr = (ratio(t + h) - ratio(t - h)) / (2 * h);
        EXPECT_NEAR(speed_from_field_rate(r, dr, x), roland_cerf_speed(x, eps, t), 1e-7);
    }
    EXPECT_EQ(speed_from_field_rate(0.4, 0.0, 0.3), 0.0);
}

TEST(FieldDictionary, SingularRatio)
{
    const double x = 0.3, q = std::sqrt(1 - x * x);
    EXPECT_THROW(schedule_from_fields(x * q / (1 - x * x), x), SingularRatio);
    EXPECT_THROW(speed_from_field_rate(x * q / (1 - x * x), 1.0, x), SingularRatio);
    EXPECT_THROW(schedule_from_fields(NAN, x), InvalidParameter);
}

TEST(FieldDictionary, GFromFieldRatio)
{
    EXPECT_EQ(g_from_field_ratio(0.0, 0.7, 0.3), 0.0);
    EXPECT_NEAR(g_from_field_ratio(1.0, 0.0, 0.3), 1 - 2 * 0.09, 1e-15);
    for (double x : {0.1, 0.3}) {
        const auto a = affine_g_coefficients(0.7, -0.2, x);
        PrParams pr = PrParams::defaults(x);
        pr.b = a.b_pr;
        pr.c = a.c_pr;
        for (double t : {0.0, 0.5, 2.0, 7.0}) {
            const double g = g_from_field_ratio(1.0, 0.7 * t - 0.2, x);
            EXPECT_NEAR(g, a.g0 + a.g1 * t, 1e-12);
            EXPECT_NEAR(g, perez_romanelli_fields(PrVariant::FixedPointLike, pr, t).g, 1e-12);
        }
    }
}

TEST(FieldDictionary, NonadiabaticFieldComponents)
{
    for (double x : {0.1, 0.4})
        for (auto [f, g] : {std::pair{1.0, 0.3}, std::pair{2.0, -0.5}, std::pair{0.7, 1.9}}) {
            const auto c = nonadiabatic_fields(f, g, x);
            const double x2 = x * x, k = x * std::sqrt(1 - x2);
            EXPECT_NEAR(c.omega, -f * k, 1e-15);
            EXPECT_NEAR(2 * c.Omega, f * (x2 - (1 - x2)) + g, 1e-14);
        }
}

TEST(ResonanceRatios, Examples)
{
    auto r = resonance_ratio_identities(1 / std::sqrt(2.0), 1.0);
    EXPECT_NEAR(r.ratio_fixed, 1.0, 1e-15);
    EXPECT_NEAR(r.c_of_x, 1.0, 1e-15);
    r = resonance_ratio_identities(0.6, 2.0, 1.0);
    EXPECT_NEAR(r.c_of_x, 0.75, 1e-15);
    EXPECT_NEAR(r.grc_ratio, 2.0, 1e-15);
    EXPECT_LT(resonance_ratio_identities(1e-9, 1.0).c_of_x, 1e-8);
}

TEST(Classification, GapCubedOverRootScalesWithoutFixedPoint)
{
    const auto c = classify_schedule(SpeedLaw::Gap3OverRoot, 0.1, log_grid(1e-3, 1e-1, 5));
    EXPECT_TRUE(c.grover_scaling) << c.slope;
    EXPECT_FALSE(c.fixed_point);
    EXPECT_LT(c.p_floor, 1 - 0.1 * 0.1);
    EXPECT_GT(c.p_floor, 0.5);
}
