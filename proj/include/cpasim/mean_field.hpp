#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "params.hpp"

namespace cpasim {

/// Real mean-field state (Re c, Im c, Re sigma-, Im sigma-, sigma_z).
using MeanFieldState = std::array<double, 5>;
using Matrix5 = std::array<std::array<double, 5>, 5>;

inline constexpr MeanFieldState vacuum_state{0.0, 0.0, 0.0, 0.0, -0.5};

inline MeanFieldState make_state(cplx c, cplx sigma_minus, double sigma_z) {
    return {c.real(), c.imag(), sigma_minus.real(), sigma_minus.imag(), sigma_z};
}

inline cplx field_of(const MeanFieldState& y) { return {y[0], y[1]}; }
inline cplx coherence_of(const MeanFieldState& y) { return {y[2], y[3]}; }

/// Nonlinear coefficient in the drive frame. A pump mismatch
/// delta = omega_p - 2 omega_r makes it rotate as G exp(-i delta t).
inline cplx rotating_g_nl(const SystemParams& p, double t, double delta) {
    return std::polar(p.g_nl_mag, p.phi - delta * t);
}

/// Mean-field equations of motion with noise averaged out:
///   dc/dt  = -(kappa/2 + i dc) c - i g s + 2 G(t) c* + Omega
///   ds/dt  = -(gamma/2 + i dtls) s + 2 i g c z
///   dz/dt  = -gamma (z + 1/2) + i g (c* s - c s*)
inline MeanFieldState mean_field_rhs(const MeanFieldState& y, double t, const SystemParams& p, double delta) {
    const auto [x, yi, u, v, z] = y;
    const cplx gn = rotating_g_nl(p, t, delta);
    const double gr = gn.real();
    const double gi = gn.imag();
    const double hk = 0.5 * p.kappa();
    const double hg = 0.5 * p.gamma;
    return {
        -hk * x + p.delta_c * yi + p.g * v + 2.0 * (gr * x + gi * yi) + p.omega_d,
        -hk * yi - p.delta_c * x - p.g * u + 2.0 * (gi * x - gr * yi),
        -hg * u + p.delta_tls * v - 2.0 * p.g * z * yi,
        -hg * v - p.delta_tls * u + 2.0 * p.g * z * x,
        -p.gamma * (z + 0.5) - 2.0 * p.g * (x * v - yi * u),
    };
}

/// Analytic Jacobian of mean_field_rhs with respect to the state.
inline Matrix5 mean_field_jacobian(const MeanFieldState& y, double t, const SystemParams& p, double delta) {
    const auto [x, yi, u, v, z] = y;
    const cplx gn = rotating_g_nl(p, t, delta);
    const double gr = gn.real();
    const double gi = gn.imag();
    const double hk = 0.5 * p.kappa();
    const double hg = 0.5 * p.gamma;
    const double g = p.g;
    Matrix5 j{};
    j[0] = {-hk + 2.0 * gr, p.delta_c + 2.0 * gi, 0.0, g, 0.0};
    j[1] = {-p.delta_c + 2.0 * gi, -hk - 2.0 * gr, -g, 0.0, 0.0};
    j[2] = {0.0, -2.0 * g * z, -hg, p.delta_tls, -2.0 * g * yi};
    j[3] = {2.0 * g * z, 0.0, -p.delta_tls, -hg, 2.0 * g * x};
    j[4] = {-2.0 * g * v, 2.0 * g * u, 2.0 * g * yi, -2.0 * g * x, -p.gamma};
    return j;
}

/// |sigma-|^2 + sigma_z^2; at most 1/4 for physical atomic states.
inline double bloch_norm2(const MeanFieldState& y) { return y[2] * y[2] + y[3] * y[3] + y[4] * y[4]; }

} // namespace cpasim
