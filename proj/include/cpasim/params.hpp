#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace cpasim {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Model rates and detunings, all measured in units of the atomic decay
/// rate gamma. Field amplitudes carry units of sqrt(gamma).
struct SystemParams {
    double gamma = 1.0;
    double kappa_l = 10.0;
    double kappa_r = 10.0;
    double g = 1.0;          ///< atom-cavity coupling
    double delta_c = 0.0;    ///< cavity detuning from the reference drive
    double delta_tls = 0.0;  ///< atomic detuning from the reference drive
    double g_nl_mag = 0.0;   ///< |G| of the pumped nonlinear crystal
    double phi = 0.0;        ///< pump phase relative to the reference drive
    double omega_d = 0.0;    ///< total (real) drive amplitude

    [[nodiscard]] double kappa() const noexcept { return kappa_l + kappa_r; }

    [[nodiscard]] cplx g_nl() const noexcept { return std::polar(g_nl_mag, phi); }

    [[nodiscard]] bool symmetric_mirrors() const noexcept { return kappa_l == kappa_r; }

    /// Throws ValidationError naming the first violated invariant.
    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw ValidationError(what);
        };
        require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
        require(std::isfinite(kappa_l) && kappa_l > 0.0, "kappa_l must be positive");
        require(std::isfinite(kappa_r) && kappa_r > 0.0, "kappa_r must be positive");
        require(std::isfinite(g) && g >= 0.0, "g must be nonnegative");
        require(std::isfinite(delta_c), "delta_c must be finite");
        require(std::isfinite(delta_tls), "delta_tls must be finite");
        require(std::isfinite(g_nl_mag) && g_nl_mag >= 0.0, "g_nl_mag must be nonnegative");
        require(std::isfinite(phi) && phi >= 0.0 && phi < two_pi, "phi must lie in [0, 2pi)");
        require(std::isfinite(omega_d) && omega_d >= 0.0, "omega_d must be nonnegative");
    }
};

/// Maps any finite angle onto [0, 2pi).
inline double wrap_phase(double phi) {
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

/// Per-mirror input amplitudes for a total drive, split so that the two
/// inputs are in phase and satisfy c_l / c_r = sqrt(kappa_l / kappa_r).
struct BalancedInputs {
    double left;
    double right;
};

inline BalancedInputs balanced_inputs(const SystemParams& p, double omega_d) {
    const double s = omega_d / p.kappa();
    return {std::sqrt(p.kappa_l) * s, std::sqrt(p.kappa_r) * s};
}

/// Total drive producing left-port input intensity |c_in_l|^2 under the
/// balanced split. Reduces to 2 sqrt(kappa/2) sqrt(I) for symmetric mirrors.
inline double drive_for_input_intensity(const SystemParams& p, double intensity) {
    return p.kappa() * std::sqrt(intensity / p.kappa_l);
}

inline double input_intensity_for_drive(const SystemParams& p, double omega_d) {
    const double c = balanced_inputs(p, omega_d).left;
    return c * c;
}

} // namespace cpasim
