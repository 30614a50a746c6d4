#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <cpasim/config.hpp>
#include <cpasim/cpa.hpp>
#include <cpasim/csv.hpp>
#include <cpasim/dynamics.hpp>
#include <cpasim/presets.hpp>
#include <cpasim/steady_solver.hpp>
#include <cpasim/svg.hpp>
#include <cpasim/sweep.hpp>

namespace fs = std::filesystem;
using namespace cpasim;

namespace {

enum Exit { ok = 0, io_failure = 1, validation = 2, infeasible = 3, numerical = 4 };

struct Common {
    std::string config;
    std::string out = ".";
    bool csv = false;
    bool svg = false;
    std::optional<double> tol_res;
    std::optional<double> tol_stab;
    double gamma = 1.0;

    // Neither flag means both outputs.
    [[nodiscard]] bool want_csv() const { return csv || !svg; }
    [[nodiscard]] bool want_svg() const { return svg || !csv; }
    [[nodiscard]] Units units() const { return {gamma}; }
    [[nodiscard]] std::string path(const std::string& name) const { return (fs::path(out) / name).string(); }
};

RunConfig load(const Common& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (c.tol_res) cfg.tol_res = *c.tol_res;
    if (c.tol_stab) cfg.tol_stab = *c.tol_stab;
    cfg.validate();
    return cfg;
}

void announce(const std::string& path) { std::printf("wrote %s\n", path.c_str()); }

void print_cpa(const CPAReport& r, const Units& u, const std::string& tag = "") {
    if (!tag.empty()) std::printf("[%s]\n", tag.c_str());
    for (const auto& [k, v] : cpa_fields(r, u)) std::printf("  %-20s %s\n", k.c_str(), v.c_str());
}

int run_steady(const Common& c) {
    const auto cfg = load(c);
    const auto p = cfg.resolved();
    const auto sol = solve_steady_states(p, cfg.solver_options());
    const Units u = c.units();
    std::printf("%zu steady state(s)%s\n", sol.states.size(), sol.parametric_regime ? " [parametric regime]" : "");
    for (const auto& s : sol.states)
        std::printf("  n_c = %-22.17g %-9s max Re(lambda) = %.6g\n", s.n_c, to_string(s.stability), u.rate(s.margin));
    for (const auto& w : sol.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (c.want_csv()) {
        const auto path = c.path("steady.csv");
        write_file(path, [&](std::ostream& os) { write_steady_csv(os, sol, u); });
        announce(path);
    }
    return ok;
}

int run_cpa(const Common& c) {
    const auto cfg = load(c);
    CpaOptions opt;
    opt.auto_detuning = cfg.cpa_auto_detuning;
    opt.solver = cfg.solver_options();
    const auto r = verify_cpa(cfg.params, opt);
    print_cpa(r, c.units());
    if (c.want_csv()) {
        const auto path = c.path("cpa.csv");
        write_file(path, [&](std::ostream& os) { write_cpa_csv(os, r, c.units()); });
        announce(path);
    }
    return r.feasible ? ok : infeasible;
}

void emit_sweep(const Common& c, const std::string& stem, const std::vector<HysteresisCurve>& curves,
                const std::vector<svg::HysteresisSeries>& series, const std::vector<std::string>& csv_names,
                const std::string& title) {
    if (c.want_csv())
        for (std::size_t i = 0; i < curves.size(); ++i) {
            const auto path = c.path(csv_names[i]);
            write_file(path, [&](std::ostream& os) { write_sweep_csv(os, curves[i], c.units()); });
            announce(path);
        }
    if (c.want_svg()) {
        const auto path = c.path(stem + ".svg");
        write_file(path, [&](std::ostream& os) { svg::render_hysteresis(os, series, title, c.gamma); });
        announce(path);
    }
}

void summarize(const HysteresisCurve& curve) {
    std::printf("  pattern %s, %d branch(es), %zu fold(s)\n", to_string(curve.pattern), curve.branch_count,
                curve.folds.size());
    for (const auto& f : curve.folds)
        std::printf("    fold at I = %.10g, n_c = %.10g (%d -> %d roots%s)\n", f.input_intensity, f.n_c, f.roots_below,
                    f.roots_above, f.kind == FoldKind::ZeroDrive ? ", zero drive" : "");
    for (const auto& m : curve.cpa_markers)
        std::printf("    CPA at I = %.10g, output = %.3g, %s\n", m.input_intensity, m.output_intensity,
                    to_string(m.stability));
}

int run_sweep(const Common& c) {
    const auto cfg = load(c);
    const auto p = cfg.resolved();
    const auto curve = trace_hysteresis(p, cfg.sweep_grid(), cfg.solver_options());
    summarize(curve);
    emit_sweep(c, "sweep", {curve}, {{&curve, "Δ_TLS = " + svg::tick_label(c.gamma * p.delta_tls), "CPA"}},
               {"sweep.csv"}, "hysteresis");
    return curve.continuation_ok ? ok : numerical;
}

void emit_boundary(const Common& c, const std::string& stem, const BoundaryMap& bm) {
    if (c.want_csv()) {
        const auto path = c.path(stem + ".csv");
        write_file(path, [&](std::ostream& os) { write_boundary_csv(os, bm, c.units()); });
        announce(path);
    }
    if (c.want_svg()) {
        const auto path = c.path(stem + ".svg");
        write_file(path, [&](std::ostream& os) { svg::render_boundary(os, bm, c.gamma); });
        announce(path);
    }
}

int run_boundary(const Common& c) {
    const auto cfg = load(c);
    const auto bm = boundary_map(cfg.params.gamma, cfg.boundary.g_fixed, cfg.boundary.delta_tls_fixed, cfg.beta_grid());
    emit_boundary(c, "boundary", bm);
    return ok;
}

/// Runs one trajectory per mismatch value on its own thread.
std::vector<TimeTrace> evolve_all(const SystemParams& p, const std::vector<double>& deltas,
                                  const MeanFieldState& initial, double t_end, double dt) {
    std::vector<TimeTrace> traces(deltas.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < deltas.size(); ++i)
        pool.emplace_back([&, i] { traces[i] = integrate(p, deltas[i], initial, t_end, dt); });
    for (auto& t : pool) t.join();
    return traces;
}

int emit_traces(const Common& c, const std::string& stem, const std::vector<TimeTrace>& traces) {
    int code = ok;
    for (const auto& t : traces) {
        if (t.failure) {
            std::fprintf(stderr, "delta = %g: integration stopped at t = %g: %s\n", t.delta,
                         t.times.empty() ? 0.0 : t.times.back(), t.failure->c_str());
            code = numerical;
        }
        if (c.want_csv()) {
            const auto path = c.path(stem + "_" + delta_suffix(c.gamma * t.delta) + ".csv");
            write_file(path, [&](std::ostream& os) { write_trace_csv(os, t, c.units()); });
            announce(path);
        }
    }
    if (c.want_svg()) {
        const auto path = c.path(stem + ".svg");
        write_file(path, [&](std::ostream& os) { svg::render_traces(os, traces, "time evolution", c.gamma); });
        announce(path);
    }
    return code;
}

int run_evolve(const Common& c) {
    const auto cfg = load(c);
    const auto p = cfg.resolved();
    const auto traces =
        evolve_all(p, cfg.evolve.deltas, cfg.evolve.initial.value_or(vacuum_state), cfg.evolve.t_end, cfg.evolve.sample_dt);
    return emit_traces(c, "evolve", traces);
}

int run_reproduce(const Common& c, const std::string& figure) {
    SolverOptions opt;
    if (c.tol_res) opt.eps_res = *c.tol_res;
    if (c.tol_stab) opt.eps_stab = *c.tol_stab;

    if (figure == "fig2") {
        const presets::BoundaryDefaults d;
        emit_boundary(c, "fig2", boundary_map(d.gamma, d.g_fixed, d.delta_tls_fixed, logspace(d.beta_min, d.beta_max, d.points)));
        return ok;
    }
    if (figure == "fig3a" || figure == "fig3b" || figure == "fig3c") {
        const char panel = figure.back();
        const auto labels = presets::fig3_labels(panel);
        std::vector<HysteresisCurve> curves;
        std::vector<std::string> names;
        int code = ok;
        for (double dt : presets::fig3_detunings) {
            const auto p = presets::fig3(panel, dt);
            CpaOptions co;
            co.solver = opt;
            print_cpa(verify_cpa(p, co), c.units(), figure + ", Δ_TLS = " + svg::tick_label(dt));
            curves.push_back(trace_hysteresis(p, presets::fig3_grid(p), opt));
            summarize(curves.back());
            if (!curves.back().continuation_ok) code = numerical;
            names.push_back(figure + "_dtls" + svg::tick_label(dt) + ".csv");
        }
        std::vector<svg::HysteresisSeries> series;
        for (std::size_t i = 0; i < curves.size(); ++i)
            series.push_back({&curves[i], "Δ_TLS = " + svg::tick_label(c.gamma * presets::fig3_detunings[i]), labels[i]});
        emit_sweep(c, figure, curves, series, names, figure);
        return code;
    }
    if (figure == "fig4") {
        const auto traces = evolve_all(presets::fig4(), presets::fig4_deltas, vacuum_state, 1500.0, 0.05);
        return emit_traces(c, "fig4", traces);
    }
    throw ValidationError("unknown figure '" + figure + "' (expected fig2, fig3a, fig3b, fig3c or fig4)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, CPA conditions and dynamics of a driven cavity with an atom and a pumped crystal"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--config", c.config, "JSON run configuration");
    app.add_option("--out", c.out, "output directory");
    app.add_flag("--csv", c.csv, "write CSV files");
    app.add_flag("--svg", c.svg, "write SVG plots");
    app.add_option("--tol-res", c.tol_res, "relative residual tolerance for roots");
    app.add_option("--tol-stab", c.tol_stab, "marginal band on the largest eigenvalue real part");
    app.add_option("--gamma", c.gamma, "atomic decay rate; rescales emitted values to physical units")
        ->check(CLI::PositiveNumber);

    auto* steady = app.add_subcommand("steady", "steady states and their stability at one parameter point");
    auto* cpa = app.add_subcommand("cpa", "CPA condition report");
    auto* sweep = app.add_subcommand("sweep", "hysteresis curve over input intensity");
    auto* boundary = app.add_subcommand("boundary", "CPA feasibility boundaries against beta");
    auto* evolve = app.add_subcommand("evolve", "mean-field time evolution for each pump mismatch");
    auto* reproduce = app.add_subcommand("reproduce", "named figure parameter sets");
    std::string figure;
    reproduce->add_option("figure", figure, "fig2, fig3a, fig3b, fig3c or fig4")->required();
    for (auto* s : {steady, cpa, sweep, boundary, evolve, reproduce}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try {
        if (c.want_csv() || c.want_svg()) fs::create_directories(c.out);
        if (*steady) return run_steady(c);
        if (*cpa) return run_cpa(c);
        if (*sweep) return run_sweep(c);
        if (*boundary) return run_boundary(c);
        if (*evolve) return run_evolve(c);
        if (*reproduce) return run_reproduce(c, figure);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return validation;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return validation;
    } catch (const PreconditionViolated& e) {
        std::fprintf(stderr, "invalid request: %s\n", e.what());
        return validation;
    } catch (const AsymmetricMirrors& e) {
        std::fprintf(stderr, "invalid request: %s\n", e.what());
        return validation;
    } catch (const Infeasible& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return infeasible;
    } catch (const NonPositiveBeta& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return infeasible;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return io_failure;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return io_failure;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return numerical;
    }
    return ok;
}
