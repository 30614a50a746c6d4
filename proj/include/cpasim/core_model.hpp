#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "errors.hpp"
#include "params.hpp"

namespace cpasim {

/// Denominator guard for the steady intracavity field, in gamma^2 units.
inline constexpr double default_eps_den = 1e-9;

struct EffectiveCavity {
    double kappa0;  ///< atom-dressed cavity half-linewidth
    double delta0;  ///< atom-dressed cavity detuning
};

/// gamma^2/4 + delta_tls^2 + 2 g^2 n_c, the saturation denominator shared by
/// the dressed cavity parameters and the atomic inversion.
inline double saturation_denominator(double n_c, const SystemParams& p) {
    return 0.25 * p.gamma * p.gamma + p.delta_tls * p.delta_tls + 2.0 * p.g * p.g * n_c;
}

inline EffectiveCavity effective_cavity_params(double n_c, const SystemParams& p) {
    const double d = saturation_denominator(n_c, p);
    const double g2 = p.g * p.g;
    return {0.5 * p.kappa() + 0.5 * g2 * p.gamma / d, p.delta_c - g2 * p.delta_tls / d};
}

/// kappa0^2 + delta0^2 - 4|G|^2 at photon number n_c.
inline double field_denominator(double n_c, const SystemParams& p) {
    const auto [k0, d0] = effective_cavity_params(n_c, p);
    return k0 * k0 + d0 * d0 - 4.0 * p.g_nl_mag * p.g_nl_mag;
}

/// Steady intracavity mean field for a given photon number. The photon
/// number enters only through the dressed cavity parameters, so the result
/// is self-consistent only when |<c>|^2 == n_c.
inline cplx intracavity_field(double n_c, const SystemParams& p, double eps_den = default_eps_den) {
    const auto [k0, d0] = effective_cavity_params(n_c, p);
    const double den = k0 * k0 + d0 * d0 - 4.0 * p.g_nl_mag * p.g_nl_mag;
    if (std::abs(den) < eps_den)
        throw ParametricSingularity("intracavity field denominator vanishes (parametric threshold)");
    const cplx num = cplx(k0, -d0) * p.omega_d + 2.0 * p.g_nl() * p.omega_d;
    return num / den;
}

struct AtomicExpectations {
    cplx sigma_minus;
    double sigma_z;
};

/// Mean-field steady atomic coherence and inversion driven by field c_bar.
inline AtomicExpectations atomic_expectations(cplx c_bar, const SystemParams& p) {
    const double d0 = 0.25 * p.gamma * p.gamma + p.delta_tls * p.delta_tls;
    const double sz = -0.5 * d0 / (d0 + 2.0 * p.g * p.g * std::norm(c_bar));
    const cplx sm = cplx(0.0, 2.0 * p.g) * c_bar * sz / cplx(0.5 * p.gamma, p.delta_tls);
    return {sm, sz};
}

/// Mean output fields at the left and right mirrors.
inline std::pair<cplx, cplx> output_fields(cplx c_bar, cplx c_in_l, cplx c_in_r, const SystemParams& p) {
    return {std::sqrt(p.kappa_l) * c_bar - c_in_l, std::sqrt(p.kappa_r) * c_bar - c_in_r};
}

struct SocEffective {
    double beta;           ///< kappa/2 + 2|G|cos(phi); may be negative
    double delta_c_prime;  ///< delta_c - 2|G|sin(phi)
};

/// Evaluated in extended precision: beta is often a small difference of
/// O(kappa) terms.
inline SocEffective soc_effective_params(const SystemParams& p) {
    const long double g2 = 2.0L * p.g_nl_mag;
    const long double phi = p.phi;
    return {static_cast<double>(0.5L * p.kappa_l + 0.5L * p.kappa_r + g2 * std::cos(phi)),
            static_cast<double>(p.delta_c - g2 * std::sin(phi))};
}

} // namespace cpasim
