#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "cpa_conditions.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "steady_solver.hpp"
#include "sweep.hpp"

namespace cpasim {

enum class BranchLocation {
    OutsideBistableStable,
    OutsideBistableUnstable,
    InsideBistableStable,
    InsideBistableUnstable,
    Monostable,
};

inline const char* to_string(BranchLocation b) {
    switch (b) {
    case BranchLocation::OutsideBistableStable: return "outside-bistable-stable";
    case BranchLocation::OutsideBistableUnstable: return "outside-bistable-unstable";
    case BranchLocation::InsideBistableStable: return "inside-bistable-stable";
    case BranchLocation::InsideBistableUnstable: return "inside-bistable-unstable";
    case BranchLocation::Monostable: return "monostable";
    }
    return "?";
}

struct CpaOptions {
    /// Use the detuning the CPA conditions require instead of p.delta_c.
    bool auto_detuning = true;
    SolverOptions solver{};
    double match_rtol = 1e-8;     ///< solved root vs predicted CPA photon number
    double null_rtol = 1e-12;     ///< output intensities vs input intensity
    double window_margin = 1e-9;  ///< inside means strictly within the folds by this much
    double scan_factor = 4.0;     ///< fold scan covers [0, scan_factor * I_cpa]
    std::size_t scan_points = 401;
};

struct CPAReport {
    double beta = 0.0;
    double g_c = 0.0;
    double delta_tls_c = 0.0;
    double cooperativity = 0.0;  ///< g^2 / (kappa gamma)
    double n_c_cpa = 0.0;
    double delta_c_required = 0.0;
    double delta_c_used = 0.0;
    double omega_d_cpa = 0.0;
    double input_intensity = 0.0;
    bool feasible = false;
    std::vector<std::string> reasons;  ///< violated-condition tags
    double residual_out = 0.0;         ///< max output intensity at the operating point
    std::optional<SteadyState> operating_point;
    std::optional<BistableWindow> window;  ///< bistable window containing the CPA input, if any
    BranchLocation branch_location = BranchLocation::Monostable;
};

/// Assembles the CPA conditions for p and confirms them against the full
/// steady-state solution at the CPA drive.
inline CPAReport verify_cpa(const SystemParams& p, const CpaOptions& opt = {}) {
    p.validate();
    CPAReport r;
    const auto soc = soc_effective_params(p);
    r.beta = soc.beta;
    if (!(r.beta > 0.0)) throw NonPositiveBeta("beta <= 0: CPA analysis undefined");
    r.g_c = critical_coupling(r.beta, p.delta_tls, p.gamma);
    r.delta_tls_c = critical_detuning(p.g, r.beta, p.gamma);
    r.cooperativity = p.g * p.g / (p.kappa() * p.gamma);
    r.n_c_cpa = cpa_photon_number(p);
    r.delta_c_required = cpa_cavity_detuning(p);
    r.delta_c_used = opt.auto_detuning ? r.delta_c_required : p.delta_c;

    if (!(p.g > r.g_c)) r.reasons.emplace_back("CouplingBelowCritical");
    if (!(std::abs(p.delta_tls) < r.delta_tls_c)) r.reasons.emplace_back("DetuningExceedsCritical");
    if (!(r.n_c_cpa > 0.0)) r.reasons.emplace_back("NonPositivePhotonNumber");
    if (!opt.auto_detuning &&
        std::abs(p.delta_c - r.delta_c_required) > 1e-9 * std::max(1.0, std::abs(r.delta_c_required)))
        r.reasons.emplace_back("DetuningMismatch");
    if (!r.reasons.empty() && !(r.n_c_cpa > 0.0)) return r;

    const auto drive = cpa_input_amplitude(p, r.n_c_cpa);
    r.omega_d_cpa = drive.omega_d;
    r.input_intensity = drive.input_intensity;

    SystemParams q = p;
    q.delta_c = r.delta_c_used;
    q.omega_d = drive.omega_d;
    const auto in = balanced_inputs(q, q.omega_d);
    if (std::abs(in.left / in.right - std::sqrt(q.kappa_l / q.kappa_r)) > 1e-12)
        r.reasons.emplace_back("InputBalanceViolated");

    const auto sol = solve_steady_states(q, opt.solver);
    const SteadyState* best = nullptr;
    for (const auto& s : sol.states)
        if (!best || std::abs(s.n_c - r.n_c_cpa) < std::abs(best->n_c - r.n_c_cpa)) best = &s;
    if (!best || std::abs(best->n_c - r.n_c_cpa) > opt.match_rtol * r.n_c_cpa) {
        r.reasons.emplace_back("NoMatchingSteadyState");
    } else {
        r.operating_point = *best;
        const auto [ol, orr] = output_fields(best->c_bar, in.left, in.right, q);
        r.residual_out = std::max(std::norm(ol), std::norm(orr));
        if (!(r.residual_out < opt.null_rtol * r.input_intensity)) r.reasons.emplace_back("OutputsNotNulled");
    }

    // Bistable structure around the CPA input.
    SystemParams scan = q;
    const auto grid = fold_scan_grid(linspace(0.0, opt.scan_factor * r.input_intensity, opt.scan_points));
    const auto folds = locate_folds(scan, grid, opt.solver);
    const auto windows = bistable_windows(folds);
    const bool stable = r.operating_point && r.operating_point->stability == Stability::Stable;
    if (windows.empty()) {
        r.branch_location = BranchLocation::Monostable;
    } else {
        for (const auto& w : windows)
            if (r.input_intensity > w.lo + opt.window_margin && r.input_intensity < w.hi - opt.window_margin)
                r.window = w;
        if (r.window)
            r.branch_location = stable ? BranchLocation::InsideBistableStable : BranchLocation::InsideBistableUnstable;
        else
            r.branch_location = stable ? BranchLocation::OutsideBistableStable : BranchLocation::OutsideBistableUnstable;
    }

    r.feasible = r.reasons.empty();
    return r;
}

/// True when two parameter sets sharing beta but differing in the crystal
/// settings (|G|, phi) put the CPA point at the same (n_c, input intensity).
inline bool cpa_invariance_check(const SystemParams& a, const SystemParams& b, double rtol = 1e-12) {
    auto same = [](double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y)); };
    if (a.gamma != b.gamma || a.kappa_l != b.kappa_l || a.kappa_r != b.kappa_r || a.g != b.g ||
        a.delta_tls != b.delta_tls)
        throw PreconditionViolated("parameter sets may differ only in |G|, phi (and the dependent delta_c, drive)");
    const double ba = soc_effective_params(a).beta;
    const double bb = soc_effective_params(b).beta;
    if (!same(ba, bb, 1e-10)) throw PreconditionViolated("parameter sets must share beta");
    const double na = cpa_photon_number(a);
    const double nb = cpa_photon_number(b);
    if (!(na > 0.0) || !(nb > 0.0)) return same(na, nb, rtol);
    const auto da = cpa_input_amplitude(a, na);
    const auto db = cpa_input_amplitude(b, nb);
    return same(na, nb, rtol) && same(da.input_intensity, db.input_intensity, rtol);
}

} // namespace cpasim
