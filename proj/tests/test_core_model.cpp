#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <cpasim/core_model.hpp>
#include <cpasim/mean_field.hpp>
#include <cpasim/params.hpp>

#include "oracles.hpp"

using namespace cpasim;

namespace {

SystemParams panel_c() {
    SystemParams p;
    p.kappa_l = p.kappa_r = 10.0;
    p.g = 1.0;
    p.delta_tls = 4.5;
    p.g_nl_mag = 4.99;
    p.phi = std::numbers::pi;
    p.delta_c = 0.18;
    p.omega_d = 30.0;
    return p;
}

} // namespace

TEST(Params, ValidationNamesTheInvariant) {
    SystemParams p;
    p.kappa_l = -1.0;
    try {
        p.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_STREQ(e.what(), "kappa_l must be positive");
    }
    p = {};
    p.phi = two_pi;
    EXPECT_THROW(p.validate(), ValidationError);
    p.phi = wrap_phase(two_pi + 0.25);
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.phi, 0.25, 1e-15);
    EXPECT_DOUBLE_EQ(wrap_phase(-0.5), two_pi - 0.5);
}

TEST(Params, BalancedInputsAreInPhaseWithMirrorRatio) {
    SystemParams p;
    p.kappa_l = 3.0;
    p.kappa_r = 12.0;
    const auto in = balanced_inputs(p, 7.5);
    EXPECT_NEAR(in.left / in.right, std::sqrt(3.0 / 12.0), 1e-15);
    // sqrt(kappa_l) c_l + sqrt(kappa_r) c_r must reproduce the total drive.
    EXPECT_NEAR(std::sqrt(p.kappa_l) * in.left + std::sqrt(p.kappa_r) * in.right, 7.5, 1e-13);
    EXPECT_NEAR(input_intensity_for_drive(p, drive_for_input_intensity(p, 4.2)), 4.2, 1e-13);
}

TEST(Params, SymmetricDriveMatchesTwoSqrtHalfKappa) {
    SystemParams p;
    p.kappa_l = p.kappa_r = 10.0;
    EXPECT_NEAR(drive_for_input_intensity(p, 22.5), 2.0 * std::sqrt(10.0) * std::sqrt(22.5), 1e-12);
    EXPECT_NEAR(drive_for_input_intensity(p, 22.5), 30.0, 1e-12);
}

TEST(CoreModel, SocEffectiveParameters) {
    SystemParams p;
    p.kappa_l = p.kappa_r = 10.0;
    p.g_nl_mag = 9.98;
    p.phi = 2.0 * std::numbers::pi / 3.0;
    EXPECT_NEAR(soc_effective_params(p).beta, 0.02, 1e-12);
    p.phi = 4.0 * std::numbers::pi / 3.0;
    EXPECT_NEAR(soc_effective_params(p).beta, 0.02, 1e-12);
    p.g_nl_mag = 4.99;
    p.phi = std::numbers::pi;
    EXPECT_NEAR(soc_effective_params(p).beta, 0.02, 1e-12);

    p.g_nl_mag = 0.0;
    p.delta_c = 1.7;
    const auto s = soc_effective_params(p);
    EXPECT_DOUBLE_EQ(s.beta, 10.0);
    EXPECT_DOUBLE_EQ(s.delta_c_prime, 1.7);
}

TEST(CoreModel, DressedDecayIsBoundedAndDecreasing) {
    oracle::ParamSampler rs(11);
    for (int k = 0; k < 200; ++k) {
        const auto p = rs.draw();
        const double lo = 0.5 * p.kappa();
        const double hi = lo + 2.0 * p.g * p.g / p.gamma;
        double prev = std::numeric_limits<double>::infinity();
        for (double n = 0.0; n < 1e4; n = n * 1.7 + 0.01) {
            const double k0 = effective_cavity_params(n, p).kappa0;
            EXPECT_GE(k0, lo);
            EXPECT_LE(k0, hi * (1 + 1e-15));
            EXPECT_LE(k0, prev);
            prev = k0;
        }
    }
}

TEST(CoreModel, DressedDetuningLimits) {
    auto p = panel_c();
    EXPECT_NEAR(effective_cavity_params(1e12, p).delta0, p.delta_c, 1e-10);
    p.g = 0.0;
    EXPECT_DOUBLE_EQ(effective_cavity_params(3.0, p).delta0, p.delta_c);
    EXPECT_DOUBLE_EQ(effective_cavity_params(3.0, p).kappa0, 0.5 * p.kappa());
}

TEST(CoreModel, SaturationDenominatorAtUnitGamma) {
    SystemParams p;
    p.g = 1.0;
    p.delta_tls = 4.5;
    EXPECT_DOUBLE_EQ(saturation_denominator(0.0, p), 0.25 + 20.25);
    EXPECT_DOUBLE_EQ(saturation_denominator(2.25, p), 0.25 + 20.25 + 4.5);
}

TEST(CoreModel, BlochBoundHoldsWithEqualityOnlyAtZeroField) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    oracle::ParamSampler rs(6);
    for (int k = 0; k < 2000; ++k) {
        const auto p = rs.draw();
        const cplx c(u(rng), u(rng));
        const auto a = atomic_expectations(c, p);
        const double r2 = std::norm(a.sigma_minus) + a.sigma_z * a.sigma_z;
        EXPECT_LE(r2, 0.25 * (1 + 1e-14));
        if (std::abs(c) > 1e-3) {
            EXPECT_LT(r2, 0.25);
        }
    }
    const auto a0 = atomic_expectations(0.0, panel_c());
    EXPECT_DOUBLE_EQ(std::norm(a0.sigma_minus) + a0.sigma_z * a0.sigma_z, 0.25);
}

TEST(CoreModel, AtomicExpectationsAreStationaryUnderTheAtomicEquations) {
    oracle::ParamSampler rs(7);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        const auto p = rs.draw();
        const cplx c(u(rng), u(rng));
        const auto a = atomic_expectations(c, p);
        const auto f = mean_field_rhs(make_state(c, a.sigma_minus, a.sigma_z), 0.0, p, 0.0);
        for (int i = 2; i < 5; ++i) EXPECT_NEAR(f[i], 0.0, 1e-12) << "component " << i;
    }
}

// Eliminating the atom from the bare field equation at fixed inversion must
// reproduce intracavity_field for any photon number, self-consistent or not.
TEST(CoreModel, FieldSolvesBareFieldEquationAtFixedInversion) {
    oracle::ParamSampler rs(9);
    int checked = 0;
    while (checked < 300) {
        const auto p = rs.draw();
        const double n = rs.uniform(0.0, 50.0);
        if (std::abs(field_denominator(n, p)) < 1e-3) continue;
        const cplx c = intracavity_field(n, p);
        const double d0 = 0.25 * p.gamma * p.gamma + p.delta_tls * p.delta_tls;
        const double sz = -0.5 * d0 / (d0 + 2.0 * p.g * p.g * n);
        const cplx sm = cplx(0.0, 2.0 * p.g) * c * sz / cplx(0.5 * p.gamma, p.delta_tls);
        const cplx lhs = -cplx(0.5 * p.kappa(), p.delta_c) * c - cplx(0.0, p.g) * sm + 2.0 * p.g_nl() * std::conj(c) +
                         p.omega_d;
        const double scale = std::abs(cplx(0.5 * p.kappa(), p.delta_c) * c) + 2.0 * p.g_nl_mag * std::abs(c) + p.omega_d;
        EXPECT_LE(std::abs(lhs), 1e-12 * scale);
        ++checked;
    }
}

TEST(CoreModel, FieldDenominatorGuard) {
    auto p = panel_c();
    // Place the bare threshold exactly at n = 0 by choosing |G|.
    const auto e = effective_cavity_params(0.0, p);
    p.g_nl_mag = 0.5 * std::hypot(e.kappa0, e.delta0);
    EXPECT_THROW(intracavity_field(0.0, p), ParametricSingularity);
    EXPECT_NO_THROW(intracavity_field(5.0, p));
}

TEST(CoreModel, OutputFieldsAreLinearInEachInput) {
    const auto p = panel_c();
    const cplx c(1.3, -0.4);
    const cplx a(0.7, 0.2), b(-1.1, 0.9);
    const auto [la, ra] = output_fields(c, a, b, p);
    const auto [lb, rb] = output_fields(c, 2.0 * a, 3.0 * b, p);
    const auto [l0, r0] = output_fields(c, 0.0, 0.0, p);
    EXPECT_NEAR(std::abs((lb - l0) - 2.0 * (la - l0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs((rb - r0) - 3.0 * (ra - r0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(l0 - std::sqrt(p.kappa_l) * c), 0.0, 1e-15);
}

TEST(MeanField, VacuumIsStationaryWithoutDrive) {
    SystemParams p = panel_c();
    p.omega_d = 0.0;
    for (double v : mean_field_rhs(vacuum_state, 0.3, p, 0.1)) EXPECT_EQ(v, 0.0);
}

TEST(MeanField, DriveEntersOnlyTheRealFieldQuadrature) {
    SystemParams p = panel_c();
    p.omega_d = 1.0;
    const auto f = mean_field_rhs(vacuum_state, 0.0, p, 0.0);
    EXPECT_DOUBLE_EQ(f[0], 1.0);
    for (int i = 1; i < 5; ++i) EXPECT_EQ(f[i], 0.0);
}

TEST(MeanField, AnalyticJacobianMatchesFiniteDifferences) {
    oracle::ParamSampler rs(12);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const auto p = rs.draw();
        MeanFieldState y{u(rng), u(rng), 0.2 * u(rng), 0.2 * u(rng), -0.1 * std::abs(u(rng))};
        const auto ja = to_eigen(mean_field_jacobian(y, 0.0, p, 0.0));
        const auto jn = oracle::fd_jacobian(y, p);
        EXPECT_LE((ja - jn).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(MeanField, RotatingCrystalCoefficient) {
    auto p = panel_c();
    const cplx g0 = rotating_g_nl(p, 0.0, 0.3);
    const cplx g1 = rotating_g_nl(p, 2.0, 0.3);
    EXPECT_NEAR(std::abs(g0 - p.g_nl()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g1 - p.g_nl() * std::polar(1.0, -0.6)), 0.0, 1e-14);
}
