#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "core_model.hpp"
#include "errors.hpp"
#include "params.hpp"

namespace cpasim {

/// Photon number at which both outputs can vanish:
///   n = (1/4) (gamma/beta - (gamma^2 + 4 dtls^2) / (2 g^2)).
/// Nonpositive values mean CPA is impossible for these parameters.
inline double cpa_photon_number(double beta, double g, double delta_tls, double gamma) {
    if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive for CPA analysis");
    if (g == 0.0) return -std::numeric_limits<double>::infinity();
    const long double gm = gamma, d = delta_tls, gg = g;
    return static_cast<double>(0.25L * (gm / beta - (gm * gm + 4.0L * d * d) / (2.0L * gg * gg)));
}

inline double cpa_photon_number(const SystemParams& p) {
    return cpa_photon_number(soc_effective_params(p).beta, p.g, p.delta_tls, p.gamma);
}

/// Cavity detuning that makes the output phase condition hold:
///   delta_c = 2|G| sin(phi) + 2 beta dtls / gamma.
/// At dtls = 0 this is the limit delta_c' = 0.
inline double cpa_cavity_detuning(const SystemParams& p) {
    const double beta = soc_effective_params(p).beta;
    return 2.0 * p.g_nl_mag * std::sin(p.phi) + 2.0 * beta * p.delta_tls / p.gamma;
}

/// Minimum coupling for CPA, sqrt(beta (gamma + 4 dtls^2 / gamma) / 2).
inline double critical_coupling(double beta, double delta_tls, double gamma) {
    if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive for the critical coupling");
    return std::sqrt(0.5 * beta * (gamma + 4.0 * delta_tls * delta_tls / gamma));
}

/// Largest |dtls| admitting CPA at coupling g, or nullopt when no detuning
/// works. A radicand within roundoff of zero is the boundary g = g_c(beta, 0).
inline std::optional<double> try_critical_detuning(double g, double beta, double gamma) {
    if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive for the critical detuning");
    const double a = g * g * gamma / beta;
    const double b = 0.5 * gamma * gamma;
    const double rad = 0.5 * (a - b);
    if (rad < -1e-14 * std::max(a, b)) return std::nullopt;
    return std::sqrt(std::max(rad, 0.0));
}

inline double critical_detuning(double g, double beta, double gamma) {
    const auto d = try_critical_detuning(g, beta, gamma);
    if (!d) throw Infeasible("no detuning admits CPA: g^2 gamma / beta <= gamma^2 / 2");
    return *d;
}

struct CpaDrive {
    double omega_d;
    double input_intensity;  ///< per-mirror |c_in|^2
};

/// Drive that realises kappa <c> = Omega_d at photon number n_c_cpa, with
/// equal in-phase inputs on symmetric mirrors.
inline CpaDrive cpa_input_amplitude(const SystemParams& p, double n_c_cpa) {
    if (!p.symmetric_mirrors()) throw AsymmetricMirrors("CPA drive requires kappa_l == kappa_r");
    if (n_c_cpa < 0.0) throw PreconditionViolated("CPA photon number must be nonnegative");
    const double k = p.kappa();
    return {k * std::sqrt(n_c_cpa), 0.5 * k * n_c_cpa};
}

/// Pump phase in [0, pi] giving effective decay `beta` at amplitude |G|.
inline std::optional<double> phase_for_beta(double kappa, double g_nl_mag, double beta) {
    if (g_nl_mag <= 0.0) return std::nullopt;
    const double c = (beta - 0.5 * kappa) / (2.0 * g_nl_mag);
    if (c < -1.0 || c > 1.0) return std::nullopt;
    return std::acos(c);
}

} // namespace cpasim
