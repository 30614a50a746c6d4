#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "cpa_conditions.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "sweep.hpp"

namespace cpasim::presets {

/// Atomic detunings compared in every hysteresis figure.
inline const std::vector<double> fig3_detunings{4.5, 1.5};

/// Shared base: g = gamma, kappa = 20 gamma on symmetric mirrors.
inline SystemParams base() {
    SystemParams p;
    p.gamma = 1.0;
    p.kappa_l = 10.0;
    p.kappa_r = 10.0;
    p.g = 1.0;
    return p;
}

/// Crystal settings of the three hysteresis panels, all at beta = 0.02.
inline SystemParams fig3(char panel, double delta_tls) {
    SystemParams p = base();
    p.delta_tls = delta_tls;
    switch (panel) {
    case 'a':
        p.g_nl_mag = 9.98;
        p.phi = 2.0 * std::numbers::pi / 3.0;
        break;
    case 'b':
        p.g_nl_mag = 9.98;
        p.phi = 4.0 * std::numbers::pi / 3.0;
        break;
    case 'c':
        p.g_nl_mag = 4.99;
        p.phi = std::numbers::pi;
        break;
    default: throw PreconditionViolated(std::string("unknown panel '") + panel + "'");
    }
    p.delta_c = cpa_cavity_detuning(p);
    return p;
}

/// CPA labels drawn on each panel, one per entry of fig3_detunings.
inline std::vector<std::string> fig3_labels(char panel) {
    switch (panel) {
    case 'a': return {"A₁", "A₂"};
    case 'b': return {"B₁", "B₂"};
    default: return {"A₁", "B₁"};
    }
}

/// Input grid spanning twice the CPA input intensity.
inline std::vector<double> fig3_grid(const SystemParams& p, std::size_t points = 801) {
    const double i_cpa = cpa_input_amplitude(p, cpa_photon_number(p)).input_intensity;
    return linspace(0.0, 2.0 * i_cpa, points);
}

struct BoundaryDefaults {
    double gamma = 1.0;
    double g_fixed = 1.0;
    double delta_tls_fixed = 20.0;
    double beta_min = 1e-3;
    double beta_max = 2.0;
    std::size_t points = 400;
};

/// Mismatches compared in the time-evolution figure.
inline const std::vector<double> fig4_deltas{0.01, 0.1, 1.0};

/// Time-evolution default: panel (c) at Delta_TLS = 4.5, driven at its
/// CPA input.
inline SystemParams fig4() {
    SystemParams p = fig3('c', 4.5);
    p.omega_d = cpa_input_amplitude(p, cpa_photon_number(p)).omega_d;
    return p;
}

} // namespace cpasim::presets
