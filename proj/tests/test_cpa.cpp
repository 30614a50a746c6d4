#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <cpasim/cpa.hpp>
#include <cpasim/cpa_conditions.hpp>
#include <cpasim/presets.hpp>

#include "oracles.hpp"

using namespace cpasim;
using std::numbers::pi;

namespace {

bool has_reason(const CPAReport& r, const std::string& tag) {
    return std::find(r.reasons.begin(), r.reasons.end(), tag) != r.reasons.end();
}

} // namespace

TEST(CpaConditions, PhotonNumberExamples) {
    EXPECT_NEAR(cpa_photon_number(0.02, 1.0, 4.5, 1.0), 2.25, 1e-12);
    EXPECT_NEAR(cpa_photon_number(0.02, 1.0, 1.5, 1.0), 11.25, 1e-12);
    const double dc = critical_detuning(1.0, 0.02, 1.0);
    EXPECT_NEAR(cpa_photon_number(0.02, 1.0, dc, 1.0), 0.0, 1e-12);
    EXPECT_THROW(cpa_photon_number(0.0, 1.0, 1.0, 1.0), NonPositiveBeta);
    EXPECT_THROW(cpa_photon_number(-0.1, 1.0, 1.0, 1.0), NonPositiveBeta);
}

TEST(CpaConditions, CavityDetuningExamples) {
    auto p = presets::fig3('a', 0.0);
    EXPECT_NEAR(cpa_cavity_detuning(p), 2.0 * 9.98 * std::sqrt(3.0) / 2.0, 1e-12);
    EXPECT_NEAR(cpa_cavity_detuning(p), 17.2857, 1e-3);
    p = presets::fig3('a', 4.5);
    EXPECT_NEAR(cpa_cavity_detuning(p), 17.4657, 1e-3);
    EXPECT_NEAR(cpa_cavity_detuning(p) - cpa_cavity_detuning(presets::fig3('a', 0.0)), 2.0 * 0.02 * 4.5, 1e-12);
    p = presets::fig3('c', 4.5);
    EXPECT_NEAR(cpa_cavity_detuning(p), 0.18, 1e-12);
}

TEST(CpaConditions, CriticalCouplingExamples) {
    EXPECT_NEAR(critical_coupling(0.02, 0.0, 1.0), 0.1, 1e-14);
    // Without the crystal beta = kappa/2 = 10 and g_c = sqrt(beta gamma / 2) = sqrt(5).
    EXPECT_NEAR(critical_coupling(10.0, 0.0, 1.0), std::sqrt(5.0), 1e-14);
    for (double b : {0.003, 0.1, 1.7}) EXPECT_NEAR(critical_coupling(b, 0.0, 2.0), std::sqrt(b * 2.0 / 2.0), 1e-14);
    EXPECT_THROW(critical_coupling(0.0, 0.0, 1.0), NonPositiveBeta);
}

TEST(CpaConditions, CriticalDetuningExamples) {
    EXPECT_NEAR(critical_detuning(1.0, 0.02, 1.0), std::sqrt(24.75), 1e-12);
    EXPECT_NEAR(critical_detuning(1.0, 0.02, 1.0), 4.975, 1e-3);
    EXPECT_NEAR(critical_detuning(1.0, 0.01, 1.0), 7.0534, 1e-4);
    EXPECT_NEAR(critical_detuning(critical_coupling(0.02, 0.0, 1.0), 0.02, 1.0), 0.0, 1e-7);
    EXPECT_THROW(critical_detuning(0.05, 0.02, 1.0), Infeasible);
    EXPECT_FALSE(try_critical_detuning(0.05, 0.02, 1.0).has_value());
}

TEST(CpaConditions, InputAmplitudeExamples) {
    const auto p = presets::fig3('a', 4.5);
    const auto d = cpa_input_amplitude(p, 2.25);
    EXPECT_NEAR(d.omega_d, 30.0, 1e-12);
    EXPECT_NEAR(d.input_intensity, 22.5, 1e-12);
    EXPECT_NEAR(cpa_input_amplitude(p, 11.25).input_intensity, 112.5, 1e-12);
    const auto z = cpa_input_amplitude(p, 0.0);
    EXPECT_EQ(z.omega_d, 0.0);
    EXPECT_EQ(z.input_intensity, 0.0);
    // Per-mirror amplitude Omega / (2 sqrt(kappa/2)) squared.
    EXPECT_NEAR(d.input_intensity, std::pow(d.omega_d / (2.0 * std::sqrt(0.5 * p.kappa())), 2), 1e-12);

    auto q = p;
    q.kappa_l = 8.0;
    EXPECT_THROW(cpa_input_amplitude(q, 2.25), AsymmetricMirrors);
    EXPECT_THROW(cpa_input_amplitude(p, -1.0), PreconditionViolated);
}

TEST(VerifyCpa, FigureSetsAreFeasibleWithNulledOutputs) {
    for (char panel : {'a', 'b', 'c'})
        for (double dtls : presets::fig3_detunings) {
            const auto r = verify_cpa(presets::fig3(panel, dtls));
            EXPECT_TRUE(r.feasible) << panel << " " << dtls;
            ASSERT_TRUE(r.operating_point.has_value());
            EXPECT_LT(r.residual_out, 1e-12 * r.input_intensity);
            EXPECT_NEAR(r.beta, 0.02, 1e-12);
            EXPECT_NEAR(r.cooperativity, 0.05, 1e-15);
            // The operating field is real and equals Omega / kappa.
            EXPECT_NEAR(r.operating_point->c_bar.real(), r.omega_d_cpa / 20.0, 1e-9);
            EXPECT_NEAR(r.operating_point->c_bar.imag(), 0.0, 1e-9);
        }
}

TEST(VerifyCpa, BranchLocations) {
    EXPECT_EQ(verify_cpa(presets::fig3('a', 4.5)).branch_location, BranchLocation::OutsideBistableStable);
    EXPECT_EQ(verify_cpa(presets::fig3('b', 4.5)).branch_location, BranchLocation::InsideBistableUnstable);
    EXPECT_EQ(verify_cpa(presets::fig3('c', 4.5)).branch_location, BranchLocation::InsideBistableStable);
}

TEST(VerifyCpa, DetuningBeyondCriticalIsInfeasible) {
    const auto r = verify_cpa(presets::fig3('a', 6.0));
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(has_reason(r, "DetuningExceedsCritical"));
    EXPECT_TRUE(has_reason(r, "NonPositivePhotonNumber"));
    EXPECT_LE(r.n_c_cpa, 0.0);
}

TEST(VerifyCpa, ManualDetuningMismatchIsReported) {
    auto p = presets::fig3('c', 4.5);
    p.delta_c += 0.5;
    CpaOptions opt;
    opt.auto_detuning = false;
    const auto r = verify_cpa(p, opt);
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(has_reason(r, "DetuningMismatch"));
}

TEST(VerifyCpa, NonPositiveBetaIsRejected) {
    auto p = presets::fig3('c', 4.5);
    p.g_nl_mag = 6.0;  // beta = 10 - 12 < 0
    EXPECT_THROW(verify_cpa(p), NonPositiveBeta);
}

TEST(CpaConditions, FeasibilityConditionsCoincide) {
    oracle::ParamSampler rs(31);
    int feasible = 0, infeasible = 0;
    for (int k = 0; k < 5000; ++k) {
        const double gamma = rs.uniform(0.2, 3.0);
        const double g = rs.uniform(0.01, 3.0);
        const double beta = std::exp(rs.uniform(std::log(1e-3), std::log(20.0)));
        const double dtls = rs.uniform(-10.0, 10.0);
        const double n = cpa_photon_number(beta, g, dtls, gamma);
        // Skip sets within roundoff of the boundary.
        if (std::abs(n) < 1e-9 * (gamma / beta)) continue;
        const bool a = n > 0.0;
        const bool b = g > critical_coupling(beta, dtls, gamma);
        const auto dc = try_critical_detuning(g, beta, gamma);
        const bool c = dc && std::abs(dtls) < *dc;
        EXPECT_EQ(a, b) << "case " << k;
        EXPECT_EQ(a, c) << "case " << k;
        (a ? feasible : infeasible)++;
    }
    EXPECT_GT(feasible, 100);
    EXPECT_GT(infeasible, 100);
}

TEST(CpaConditions, WeakCouplingNeedsTheCrystal) {
    const auto p = presets::fig3('c', 4.5);
    EXPECT_LT(p.g * p.g / (p.kappa() * p.gamma), 1.0);
    EXPECT_TRUE(verify_cpa(p).feasible);
    auto q = p;
    q.g_nl_mag = 0.0;
    EXPECT_NEAR(soc_effective_params(q).beta, 0.5 * q.kappa(), 1e-15);
    EXPECT_LT(q.g, critical_coupling(0.5 * q.kappa(), q.delta_tls, q.gamma));
    EXPECT_LT(cpa_photon_number(q), 0.0);
    // No detuning at all admits CPA, so verification reports infeasibility.
    EXPECT_THROW(verify_cpa(q), Infeasible);
}

TEST(CpaConditions, PhotonNumberDecreasesWithDetuning) {
    oracle::ParamSampler rs(32);
    for (int k = 0; k < 200; ++k) {
        const double gamma = rs.uniform(0.2, 3.0), g = rs.uniform(0.1, 3.0), beta = rs.uniform(0.001, 5.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double d = 0.0; d < 10.0; d += 0.37) {
            const double n = cpa_photon_number(beta, g, d, gamma);
            EXPECT_LT(n, prev);
            EXPECT_DOUBLE_EQ(n, cpa_photon_number(beta, g, -d, gamma));
            prev = n;
        }
    }
}

TEST(CpaInvariance, Examples) {
    const auto a = presets::fig3('a', 4.5);
    const auto c = presets::fig3('c', 4.5);
    // 2 pi / 3 is not representable; the stored phase shifts beta by about
    // 2e-13 relative, which the 50:41 cancellation in n amplifies to 1e-12.
    const double rep = 5e-12;
    EXPECT_TRUE(cpa_invariance_check(a, c, rep));
    EXPECT_TRUE(cpa_invariance_check(a, a));

    auto d = a;
    d.g_nl_mag = 19.96;
    d.phi = *phase_for_beta(d.kappa(), d.g_nl_mag, 0.02);
    d.delta_c = cpa_cavity_detuning(d);
    EXPECT_NEAR(soc_effective_params(d).beta, 0.02, 1e-12);
    EXPECT_TRUE(cpa_invariance_check(a, d, rep));
    // The required cavity detunings differ; only the CPA location is shared.
    EXPECT_GT(std::abs(d.delta_c - a.delta_c), 1.0);
}

TEST(CpaInvariance, Preconditions) {
    const auto a = presets::fig3('a', 4.5);
    auto b = a;
    b.g_nl_mag = 5.0;
    EXPECT_THROW(cpa_invariance_check(a, b), PreconditionViolated);
    b = a;
    b.g = 2.0;
    EXPECT_THROW(cpa_invariance_check(a, b), PreconditionViolated);
}

TEST(CpaInvariance, RandomCrystalSettingsSharingBeta) {
    oracle::ParamSampler rs(33);
    const auto base = presets::fig3('c', 4.5);
    for (int k = 0; k < 50; ++k) {
        auto q = rs.with_beta(base, 0.02);
        q.delta_c = cpa_cavity_detuning(q);
        auto r = rs.with_beta(base, 0.02);
        r.delta_c = cpa_cavity_detuning(r);
        EXPECT_TRUE(cpa_invariance_check(base, q)) << "case " << k;
        EXPECT_TRUE(cpa_invariance_check(q, r)) << "case " << k;
    }
}

TEST(CpaConditions, PhaseForBeta) {
    EXPECT_NEAR(*phase_for_beta(20.0, 4.99, 0.02), pi, 1e-12);
    EXPECT_NEAR(*phase_for_beta(20.0, 9.98, 0.02), 2.0 * pi / 3.0, 1e-12);
    EXPECT_FALSE(phase_for_beta(20.0, 4.0, 0.02).has_value());
    EXPECT_FALSE(phase_for_beta(20.0, 0.0, 0.02).has_value());
}
