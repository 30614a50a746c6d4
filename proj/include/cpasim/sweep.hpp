#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "core_model.hpp"
#include "cpa_conditions.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "steady_solver.hpp"

namespace cpasim {

enum class Pattern { Monostable, ConventionalBistable, UnconventionalBistable };

inline const char* to_string(Pattern p) {
    switch (p) {
    case Pattern::Monostable: return "monostable";
    case Pattern::ConventionalBistable: return "conventional-bistable";
    case Pattern::UnconventionalBistable: return "unconventional-bistable";
    }
    return "?";
}

enum class FoldKind {
    SaddleNode,  ///< two branches merge at positive input
    ZeroDrive,   ///< a root pair is born out of the parametric singularity as the drive switches on
};

struct Fold {
    double input_intensity;
    double n_c;
    FoldKind kind = FoldKind::SaddleNode;
    int roots_below = 0;  ///< root count just below input_intensity
    int roots_above = 0;
    /// Output intensity of the merging pair; NaN for zero-drive folds,
    /// where the field is singular.
    double output_intensity = std::numeric_limits<double>::quiet_NaN();
};

struct CurvePoint {
    double input_intensity;
    double n_c;
    double output_intensity;
    Stability stability;
    int branch_id;
};

struct CpaMarker {
    double input_intensity;
    double output_intensity;
    double n_c;
    Stability stability;
    int branch_id;
};

struct HysteresisCurve {
    std::vector<CurvePoint> points;  ///< sorted by (input_intensity, n_c)
    std::vector<Fold> folds;
    Pattern pattern = Pattern::Monostable;
    std::vector<CpaMarker> cpa_markers;
    int branch_count = 0;
    bool continuation_ok = true;
};

/// Interval of input intensity with three or more coexisting roots.
struct BistableWindow {
    double lo;
    double hi;
};

/// Root finder as a function of input intensity.
using RootsAtIntensity = std::function<std::vector<double>(double)>;

/// Uniform grid with `points` nodes on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < points; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    v.back() = hi;
    return v;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t points) {
    auto v = linspace(std::log(lo), std::log(hi), points);
    for (auto& x : v) x = std::exp(x);
    if (!v.empty()) v.front() = lo, v.back() = hi;
    return v;
}

/// Grid for fold scans. A window opening at zero drive can close inside
/// the first cell of a uniform grid, so when the grid starts at zero that
/// cell is filled with log-spaced nodes down to 1e-9 of its width.
inline std::vector<double> fold_scan_grid(const std::vector<double>& grid, std::size_t extra = 80) {
    if (grid.size() < 2 || grid.front() != 0.0) return grid;
    auto v = grid;
    const auto fine = logspace(1e-9 * grid[1], grid[1], extra);
    v.insert(v.end(), fine.begin(), fine.end() - 1);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// Self-consistent photon numbers at input intensity I, excluding roots on
/// the field singularity.
inline std::vector<double> valid_roots_at(const SystemParams& p, double intensity, const SolverOptions& opt = {}) {
    SystemParams q = p;
    q.omega_d = drive_for_input_intensity(p, intensity);
    auto roots = photon_number_roots(q, opt);
    std::erase_if(roots, [&](double n) {
        return (q.omega_d == 0.0 && n > opt.eps_root) || std::abs(field_denominator(n, q)) < opt.eps_den;
    });
    return roots;
}

namespace detail {

/// Midpoint of the closest adjacent pair, i.e. where two roots merge.
inline double merging_pair_center(const std::vector<double>& roots) {
    if (roots.size() < 2) return roots.empty() ? 0.0 : roots.front();
    std::size_t best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        const double d = roots[i + 1] - roots[i];
        if (d < gap) {
            gap = d;
            best = i;
        }
    }
    return 0.5 * (roots[best] + roots[best + 1]);
}

inline void refine_cell(const RootsAtIntensity& roots_at, double lo, std::size_t n_lo, double hi, std::size_t n_hi,
                        bool lo_is_zero_drive, std::vector<Fold>& out, int depth) {
    // A jump other than +-2 hides several folds (or a miscount) in one
    // cell: subdivide before bisecting.
    const long jump = static_cast<long>(n_hi) - static_cast<long>(n_lo);
    if ((jump != 2 && jump != -2) && depth < 4) {
        constexpr int parts = 16;
        double a = lo;
        std::size_t na = n_lo;
        for (int k = 1; k <= parts; ++k) {
            const double b = k == parts ? hi : lo + (hi - lo) * k / parts;
            const std::size_t nb = k == parts ? n_hi : roots_at(b).size();
            if (nb != na) refine_cell(roots_at, a, na, b, nb, lo_is_zero_drive && a == lo, out, depth + 1);
            a = b;
            na = nb;
        }
        return;
    }

    // Bisect on "count equals the low-end count". Near the merge point the
    // finder may see a tangential root and report an in-between count;
    // that only happens within roundoff of the fold and is assigned to the
    // upper side.
    double a = lo, b = hi;
    const double floor_width = 1e-12 * (hi - lo);  // zero-drive brackets collapse onto I = 0
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b || b - a <= floor_width) break;
        if (roots_at(m).size() == n_lo)
            a = m;
        else
            b = m;
    }
    const auto ra = roots_at(a);
    const auto rb = roots_at(b);
    Fold f;
    f.input_intensity = 0.5 * (a + b);
    f.n_c = merging_pair_center(ra.size() > rb.size() ? ra : rb);
    f.roots_below = static_cast<int>(n_lo);
    f.roots_above = static_cast<int>(n_hi);
    f.kind = (lo_is_zero_drive && a == lo) ? FoldKind::ZeroDrive : FoldKind::SaddleNode;
    out.push_back(f);
}

} // namespace detail

/// Turning points of the root count along an ascending intensity grid,
/// each refined by bisection to floating-point resolution.
inline std::vector<Fold> locate_folds(const RootsAtIntensity& roots_at, const std::vector<double>& grid) {
    std::vector<Fold> folds;
    if (grid.size() < 2) return folds;
    std::size_t prev = roots_at(grid[0]).size();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const std::size_t cur = roots_at(grid[i]).size();
        if (cur != prev) detail::refine_cell(roots_at, grid[i - 1], prev, grid[i], cur, grid[i - 1] == 0.0, folds, 0);
        prev = cur;
    }
    std::sort(folds.begin(), folds.end(),
              [](const Fold& x, const Fold& y) { return x.input_intensity < y.input_intensity; });
    return folds;
}

inline std::vector<Fold> locate_folds(const SystemParams& p, const std::vector<double>& grid,
                                      const SolverOptions& opt = {}) {
    auto folds = locate_folds([&](double I) { return valid_roots_at(p, I, opt); }, grid);
    // The field denominator does not depend on the drive; a pair born where
    // it vanishes at vanishing input is the zero-drive opening.
    const double scale = 0.25 * p.kappa() * p.kappa() + p.delta_c * p.delta_c + 4.0 * p.g_nl_mag * p.g_nl_mag;
    for (auto& f : folds) {
        // The merging pair is a double root, i.e. the critical point where
        // the polynomial comes closest to touching zero.
        SystemParams at = p;
        at.omega_d = drive_for_input_intensity(p, f.input_intensity);
        const Polynomial poly = build_polynomial(at).poly;
        const auto crit = real_roots(poly.derivative(), 0.0, std::max(cauchy_root_bound(poly), 1.0), 0.0);
        double best = std::numeric_limits<double>::infinity();
        for (double x : crit) {
            const double r = std::abs(poly(x)) / std::max(poly.magnitude(x), std::numeric_limits<double>::min());
            if (r < best) best = r, f.n_c = x;
        }
        const bool near_zero = !grid.empty() && f.input_intensity <= 1e-6 * grid.back();
        const bool singular = std::abs(field_denominator(f.n_c, p)) <= 1e-5 * scale;
        f.kind = near_zero && singular ? FoldKind::ZeroDrive : FoldKind::SaddleNode;
        if (f.kind == FoldKind::SaddleNode) {
            if (std::abs(field_denominator(f.n_c, at)) >= opt.eps_den) {
                const cplx c = intracavity_field(f.n_c, at, opt.eps_den);
                f.output_intensity = std::norm(std::sqrt(p.kappa_l) * c - std::sqrt(f.input_intensity));
            }
        }
    }
    return folds;
}

/// Maximal intensity intervals with at least three roots, delimited by folds.
inline std::vector<BistableWindow> bistable_windows(const std::vector<Fold>& folds) {
    std::vector<BistableWindow> w;
    bool is_open = false;
    double open_at = 0.0;
    for (const auto& f : folds) {
        if (f.roots_above >= 3 && f.roots_below < 3) {
            is_open = true;
            open_at = f.input_intensity;
        }
        if (f.roots_below >= 3 && f.roots_above < 3 && is_open) {
            w.push_back({open_at, f.input_intensity});
            is_open = false;
        }
    }
    if (is_open) w.push_back({open_at, std::numeric_limits<double>::infinity()});
    return w;
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline bool cpa_detuning_matches(const SystemParams& p) {
    const double req = cpa_cavity_detuning(p);
    return std::abs(p.delta_c - req) <= 1e-9 * std::max(1.0, std::abs(req));
}

} // namespace detail

/// Pattern of a traced curve:
/// - Monostable: no folds.
/// - ConventionalBistable: a closed S-loop (saddle-node folds at positive
///   input only, at most one window) on which the highest-n_c branch has the
///   larger output everywhere inside the window.
/// - UnconventionalBistable: anything else, i.e. output inversion across the
///   window, a loop opening at zero drive, or several windows.
inline Pattern classify_pattern(const HysteresisCurve& curve) {
    if (!curve.continuation_ok) throw MalformedCurve("branch continuation failed; pattern undefined");
    if (curve.folds.empty()) return Pattern::Monostable;
    const bool zero_drive = std::any_of(curve.folds.begin(), curve.folds.end(),
                                        [](const Fold& f) { return f.kind == FoldKind::ZeroDrive; });
    const auto windows = bistable_windows(curve.folds);
    if (zero_drive || windows.size() != 1) return Pattern::UnconventionalBistable;

    const auto [lo, hi] = windows.front();
    // Group points per grid node; points are sorted by (I, n_c).
    std::size_t i = 0;
    bool any = false;
    while (i < curve.points.size()) {
        std::size_t j = i;
        while (j < curve.points.size() && curve.points[j].input_intensity == curve.points[i].input_intensity) ++j;
        const double I = curve.points[i].input_intensity;
        if (j - i >= 3 && I > lo && I < hi) {
            any = true;
            if (!(curve.points[j - 1].output_intensity > curve.points[i].output_intensity))
                return Pattern::UnconventionalBistable;
        }
        i = j;
    }
    return any ? Pattern::ConventionalBistable : Pattern::UnconventionalBistable;
}

/// Branch-resolved input/output curve over an ascending intensity grid.
inline HysteresisCurve trace_hysteresis(const SystemParams& p, const std::vector<double>& input_grid,
                                        const SolverOptions& opt = {}) {
    p.validate();
    for (std::size_t i = 0; i < input_grid.size(); ++i) {
        if (!(input_grid[i] >= 0.0)) throw PreconditionViolated("input grid must be nonnegative");
        if (i > 0 && !(input_grid[i] > input_grid[i - 1]))
            throw PreconditionViolated("input grid must be strictly ascending");
    }

    HysteresisCurve curve;
    const std::size_t m = input_grid.size();
    std::vector<std::vector<SteadyState>> nodes(m);
    detail::parallel_for(m, [&](std::size_t i) {
        SystemParams q = p;
        q.omega_d = drive_for_input_intensity(p, input_grid[i]);
        nodes[i] = solve_steady_states(q, opt).states;
    });

    auto output_at = [&](const SteadyState& s, double I) {
        return std::norm(std::sqrt(p.kappa_l) * s.c_bar - std::sqrt(I));
    };

    // Roots of a polynomial cannot cross without merging, so between folds
    // branches keep their rank in n_c. At a count change the closest
    // adjacent pair is the one born or annihilated.
    std::vector<int> prev_ids;
    std::vector<double> prev_n;
    int next_id = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const auto& st = nodes[k];
        std::vector<double> cur_n;
        for (const auto& s : st) cur_n.push_back(s.n_c);
        std::vector<int> ids(st.size(), -1);

        if (k == 0 || prev_ids.empty()) {
            for (auto& id : ids) id = next_id++;
        } else {
            std::vector<int> carry = prev_ids;
            std::vector<double> carry_n = prev_n;
            std::vector<bool> fresh(cur_n.size(), false);
            std::vector<double> live = cur_n;
            std::vector<std::size_t> live_idx(cur_n.size());
            for (std::size_t i = 0; i < live_idx.size(); ++i) live_idx[i] = i;
            if ((carry.size() + live.size()) % 2 != 0) curve.continuation_ok = false;
            while (live.size() > carry.size() && live.size() >= 2) {
                std::size_t b = 0;
                double gap = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i + 1 < live.size(); ++i)
                    if (live[i + 1] - live[i] < gap) gap = live[i + 1] - live[i], b = i;
                fresh[live_idx[b]] = fresh[live_idx[b + 1]] = true;
                live.erase(live.begin() + static_cast<long>(b), live.begin() + static_cast<long>(b) + 2);
                live_idx.erase(live_idx.begin() + static_cast<long>(b), live_idx.begin() + static_cast<long>(b) + 2);
            }
            while (carry.size() > live.size() && carry.size() >= 2) {
                std::size_t b = 0;
                double gap = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i + 1 < carry_n.size(); ++i)
                    if (carry_n[i + 1] - carry_n[i] < gap) gap = carry_n[i + 1] - carry_n[i], b = i;
                carry.erase(carry.begin() + static_cast<long>(b), carry.begin() + static_cast<long>(b) + 2);
                carry_n.erase(carry_n.begin() + static_cast<long>(b), carry_n.begin() + static_cast<long>(b) + 2);
            }
            for (std::size_t i = 0; i < live_idx.size() && i < carry.size(); ++i) ids[live_idx[i]] = carry[i];
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (ids[i] < 0 || fresh[i]) ids[i] = next_id++;
        }

        for (std::size_t i = 0; i < st.size(); ++i)
            curve.points.push_back({input_grid[k], st[i].n_c, output_at(st[i], input_grid[k]), st[i].stability, ids[i]});
        prev_ids = ids;
        prev_n = cur_n;
    }
    curve.branch_count = next_id;
    std::sort(curve.points.begin(), curve.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.input_intensity != b.input_intensity ? a.input_intensity < b.input_intensity : a.n_c < b.n_c;
    });

    curve.folds = locate_folds(p, fold_scan_grid(input_grid), opt);
    for (const auto& f : curve.folds)
        if ((f.roots_above - f.roots_below) % 2 != 0) curve.continuation_ok = false;

    // CPA marker, when the configuration is tuned to the CPA detuning.
    const double beta = soc_effective_params(p).beta;
    if (m > 0 && beta > 0.0 && p.symmetric_mirrors() && detail::cpa_detuning_matches(p)) {
        const double n_cpa = cpa_photon_number(p);
        if (n_cpa > 0.0) {
            const auto drive = cpa_input_amplitude(p, n_cpa);
            if (drive.input_intensity >= input_grid.front() && drive.input_intensity <= input_grid.back()) {
                SystemParams q = p;
                q.omega_d = drive.omega_d;
                const auto sol = solve_steady_states(q, opt);
                const SteadyState* best = nullptr;
                for (const auto& s : sol.states)
                    if (!best || std::abs(s.n_c - n_cpa) < std::abs(best->n_c - n_cpa)) best = &s;
                if (best && std::abs(best->n_c - n_cpa) <= 1e-8 * n_cpa) {
                    // Branch id of the nearest traced point in (I, n_c).
                    int bid = -1;
                    double dist = std::numeric_limits<double>::infinity();
                    for (const auto& pt : curve.points) {
                        const double d = std::hypot(pt.input_intensity - drive.input_intensity, pt.n_c - best->n_c);
                        if (d < dist) dist = d, bid = pt.branch_id;
                    }
                    curve.cpa_markers.push_back({drive.input_intensity, output_at(*best, drive.input_intensity),
                                                 best->n_c, best->stability, bid});
                }
            }
        }
    }

    curve.pattern = curve.continuation_ok ? classify_pattern(curve) : Pattern::Monostable;
    return curve;
}

struct BoundaryMap {
    std::vector<double> beta;
    std::vector<double> g_c_curve;      ///< critical coupling at the fixed detuning
    std::vector<double> delta_c_curve;  ///< critical detuning at the fixed coupling (0 where none)
    std::vector<bool> delta_c_exists;
    std::vector<bool> region_mask;      ///< fixed (g, dtls) admits CPA
    double gamma = 1.0;
    double g_fixed = 0.0;
    double delta_tls_fixed = 0.0;
};

inline BoundaryMap boundary_map(double gamma, double g_fixed, double delta_tls_fixed,
                                const std::vector<double>& beta_grid) {
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] > 0.0)) throw PreconditionViolated("beta grid must be positive");
        if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
            throw PreconditionViolated("beta grid must be strictly ascending");
    }
    BoundaryMap bm;
    bm.gamma = gamma;
    bm.g_fixed = g_fixed;
    bm.delta_tls_fixed = delta_tls_fixed;
    for (double b : beta_grid) {
        bm.beta.push_back(b);
        bm.g_c_curve.push_back(critical_coupling(b, delta_tls_fixed, gamma));
        const auto dc = try_critical_detuning(g_fixed, b, gamma);
        bm.delta_c_curve.push_back(dc.value_or(0.0));
        bm.delta_c_exists.push_back(dc.has_value());
        bm.region_mask.push_back(cpa_photon_number(b, g_fixed, delta_tls_fixed, gamma) > 0.0);
    }
    return bm;
}

} // namespace cpasim
