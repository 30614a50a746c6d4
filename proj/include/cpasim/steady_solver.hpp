#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core_model.hpp"
#include "mean_field.hpp"
#include "params.hpp"
#include "polynomial.hpp"

namespace cpasim {

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
    switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
    }
    return "?";
}

struct SolverOptions {
    double eps_res = 1e-9;        ///< relative residual accepted for a root
    double eps_stab = 1e-9;       ///< marginal band on the max real part
    double eps_den = default_eps_den;
    double eps_root = 1e-12;      ///< tiny negative roots are treated as zero
    double merge_radius = 1e-8;
};

struct StabilityReport {
    std::array<cplx, 5> eigenvalues{};
    Stability cls = Stability::Marginal;
    double margin = 0.0;  ///< largest real part
};

struct SteadyState {
    double n_c = 0.0;
    cplx c_bar;
    cplx sigma_minus;
    double sigma_z = -0.5;
    Stability stability = Stability::Marginal;
    double margin = 0.0;
    double residual = 0.0;  ///< |F(n_c)| of the cleared self-consistency residual
};

/// Self-consistency polynomial in n_c. When `reduced` is set (G = 0) the
/// strictly positive factor (kappa0^2 + delta0^2) D^2 has been divided out,
/// leaving the cubic of absorptive/dispersive bistability.
struct SelfConsistencyPolynomial {
    Polynomial poly;
    bool reduced = false;
};

struct SteadySolution {
    std::vector<SteadyState> states;  ///< ascending in n_c
    /// (kappa/2)^2 + delta_c^2 <= 4|G|^2: the crystal alone exceeds the
    /// parametric threshold, so large-n_c branches are typically unstable.
    bool parametric_regime = false;
    std::vector<double> singular_roots;  ///< roots dropped at the field singularity
    std::vector<std::string> warnings;
};

/// Cleared self-consistency residual
///   F(n) = [ n (kappa0^2 + delta0^2 - 4|G|^2)^2 - |(kappa0 - i delta0 + 2G) Omega|^2 ] D(n)^4,
/// computed through the dressed cavity parameters. D^4 removes every
/// denominator, so F is a quintic in n and shares its sign with the
/// uncleared form.
inline double self_consistency_residual(double n_c, const SystemParams& p) {
    const auto [k0, d0] = effective_cavity_params(n_c, p);
    const double d = saturation_denominator(n_c, p);
    const double den = k0 * k0 + d0 * d0 - 4.0 * p.g_nl_mag * p.g_nl_mag;
    const double num = std::norm((cplx(k0, -d0) + 2.0 * p.g_nl()) * p.omega_d);
    const double d2 = d * d;
    return (n_c * den * den - num) * d2 * d2;
}

/// Expands self_consistency_residual into coefficients. With
/// K = kappa0 D and L = delta0 D (both linear in n):
///   P(n) = n (K^2 + L^2 - 4|G|^2 D^2)^2 - Omega^2 |K - iL + 2 G D|^2 D^2.
inline SelfConsistencyPolynomial build_polynomial(const SystemParams& p) {
    const double g2 = p.g * p.g;
    const Polynomial d{0.25 * p.gamma * p.gamma + p.delta_tls * p.delta_tls, 2.0 * g2};
    const Polynomial k = 0.5 * p.kappa() * d + Polynomial{0.5 * g2 * p.gamma};
    const Polynomial l = p.delta_c * d - Polynomial{g2 * p.delta_tls};
    const Polynomial n{0.0, 1.0};
    const double w2 = p.omega_d * p.omega_d;
    const Polynomial kl2 = k * k + l * l;

    if (p.g_nl_mag == 0.0) return {n * kl2 - w2 * (d * d), true};

    const cplx gn = p.g_nl();
    const Polynomial den = kl2 - (4.0 * p.g_nl_mag * p.g_nl_mag) * (d * d);
    const Polynomial re = k + (2.0 * gn.real()) * d;
    const Polynomial im = (2.0 * gn.imag()) * d - l;
    return {n * (den * den) - w2 * ((re * re + im * im) * (d * d)), false};
}

/// True when the bare cavity with the crystal is above parametric threshold.
inline bool in_parametric_regime(const SystemParams& p) {
    const double hk = 0.5 * p.kappa();
    return hk * hk + p.delta_c * p.delta_c <= 4.0 * p.g_nl_mag * p.g_nl_mag;
}

using Matrix5d = Eigen::Matrix<double, 5, 5>;

inline Matrix5d to_eigen(const Matrix5& m) {
    Matrix5d r;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r(i, j) = m[i][j];
    return r;
}

/// Linearization of the autonomous (delta = 0) mean-field flow at s.
inline Matrix5d jacobian(const SteadyState& s, const SystemParams& p) {
    return to_eigen(mean_field_jacobian(make_state(s.c_bar, s.sigma_minus, s.sigma_z), 0.0, p, 0.0));
}

inline StabilityReport classify_stability(const Matrix5d& j, double eps_stab = 1e-9) {
    Eigen::EigenSolver<Matrix5d> es(j, false);
    StabilityReport r;
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
        r.eigenvalues[i] = es.eigenvalues()(i);
        m = std::max(m, r.eigenvalues[i].real());
    }
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
              [](cplx a, cplx b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
    r.margin = m;
    r.cls = m < -eps_stab ? Stability::Stable : (m > eps_stab ? Stability::Unstable : Stability::Marginal);
    return r;
}

/// Builds the full steady state for a verified root n_c.
inline SteadyState steady_state_at(double n_c, const SystemParams& p, const SolverOptions& opt = {}) {
    SteadyState s;
    s.n_c = n_c;
    s.c_bar = intracavity_field(n_c, p, opt.eps_den);
    const auto atom = atomic_expectations(s.c_bar, p);
    s.sigma_minus = atom.sigma_minus;
    s.sigma_z = atom.sigma_z;
    s.residual = std::abs(self_consistency_residual(n_c, p));
    const auto rep = classify_stability(jacobian(s, p), opt.eps_stab);
    s.stability = rep.cls;
    s.margin = rep.margin;
    return s;
}

/// Nonnegative real roots of the self-consistency polynomial, without the
/// field/stability post-processing.
inline std::vector<double> photon_number_roots(const SystemParams& p, const SolverOptions& opt = {}) {
    const auto sc = build_polynomial(p);
    if (sc.poly.degree() < 1) return {};
    const double hi = cauchy_root_bound(sc.poly);
    auto roots = real_roots(sc.poly, -opt.eps_root, std::max(hi, 1.0), opt.merge_radius);
    for (auto& r : roots) r = std::max(r, 0.0);
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

/// All self-consistent steady states, ascending in n_c, each with its
/// linear stability class.
inline SteadySolution solve_steady_states(const SystemParams& p, const SolverOptions& opt = {}) {
    p.validate();
    SteadySolution sol;
    sol.parametric_regime = in_parametric_regime(p);
    if (sol.parametric_regime)
        sol.warnings.emplace_back("parametric regime: (kappa/2)^2 + delta_c^2 <= 4|G|^2");

    const auto sc = build_polynomial(p);
    for (double n : photon_number_roots(p, opt)) {
        // Without drive the field vanishes unless the denominator does, so
        // every n_c > 0 root is singular however roundoff places it.
        if ((p.omega_d == 0.0 && n > opt.eps_root) || std::abs(field_denominator(n, p)) < opt.eps_den) {
            sol.singular_roots.push_back(n);
            sol.warnings.emplace_back("root n_c=" + std::to_string(n) + " excluded: parametric singularity");
            continue;
        }
        SteadyState s = steady_state_at(n, p, opt);
        const double scale = std::max(1.0, sc.poly.magnitude(n));
        if (std::abs(sc.poly(n)) > opt.eps_res * scale)
            sol.warnings.emplace_back("root n_c=" + std::to_string(n) + " exceeds residual tolerance");
        sol.states.push_back(s);
    }
    return sol;
}

} // namespace cpasim
