#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpa_conditions.hpp"
#include "errors.hpp"
#include "mean_field.hpp"
#include "params.hpp"
#include "steady_solver.hpp"
#include "sweep.hpp"

namespace cpasim {

struct SweepSpec {
    double i_min = 0.0;
    std::optional<double> i_max;  ///< defaults to twice the CPA input intensity
    std::size_t points = 401;

    bool operator==(const SweepSpec&) const = default;
};

struct BoundarySpec {
    double g_fixed = 1.0;
    double delta_tls_fixed = 20.0;
    double beta_min = 1e-3;
    double beta_max = 2.0;
    std::size_t points = 400;
    bool log_spacing = true;

    bool operator==(const BoundarySpec&) const = default;
};

struct EvolveSpec {
    std::vector<double> deltas{0.0};
    double t_end = 200.0;
    double sample_dt = 0.05;
    std::optional<MeanFieldState> initial;  ///< vacuum when absent

    bool operator==(const EvolveSpec&) const = default;
};

/// Everything a CLI run needs. Physical values are in units of gamma.
struct RunConfig {
    SystemParams params;
    bool delta_c_given = false;
    bool cpa_auto_detuning = false;
    /// Drive selection; at most one of these is active.
    std::optional<double> input_intensity;
    bool cpa_drive = false;
    SweepSpec sweep;
    BoundarySpec boundary;
    EvolveSpec evolve;
    double tol_res = 1e-9;
    double tol_stab = 1e-9;

    bool operator==(const RunConfig& o) const {
        auto same_params = [](const SystemParams& a, const SystemParams& b) {
            return a.gamma == b.gamma && a.kappa_l == b.kappa_l && a.kappa_r == b.kappa_r && a.g == b.g &&
                   a.delta_c == b.delta_c && a.delta_tls == b.delta_tls && a.g_nl_mag == b.g_nl_mag &&
                   a.phi == b.phi && a.omega_d == b.omega_d;
        };
        return same_params(params, o.params) && delta_c_given == o.delta_c_given &&
               cpa_auto_detuning == o.cpa_auto_detuning && input_intensity == o.input_intensity &&
               cpa_drive == o.cpa_drive && sweep == o.sweep && boundary == o.boundary && evolve == o.evolve &&
               tol_res == o.tol_res && tol_stab == o.tol_stab;
    }

    [[nodiscard]] SolverOptions solver_options() const {
        SolverOptions s;
        s.eps_res = tol_res;
        s.eps_stab = tol_stab;
        return s;
    }

    /// Parameters with the dependent detuning and the selected drive filled in.
    [[nodiscard]] SystemParams resolved() const {
        SystemParams p = params;
        if (cpa_auto_detuning) p.delta_c = cpa_cavity_detuning(p);
        if (input_intensity) p.omega_d = drive_for_input_intensity(p, *input_intensity);
        if (cpa_drive) {
            const double n = cpa_photon_number(p);
            if (!(n > 0.0)) throw Infeasible("cpa_drive requested but the CPA photon number is not positive");
            p.omega_d = cpa_input_amplitude(p, n).omega_d;
        }
        return p;
    }

    /// Ascending input-intensity grid for sweeps.
    [[nodiscard]] std::vector<double> sweep_grid() const {
        double hi = 0.0;
        if (sweep.i_max) {
            hi = *sweep.i_max;
        } else {
            const SystemParams p = resolved();
            const double n = cpa_photon_number(p);
            if (!(n > 0.0)) throw ValidationError("sweep.i_max is required when the CPA photon number is not positive");
            hi = 2.0 * cpa_input_amplitude(p, n).input_intensity;
        }
        return linspace(sweep.i_min, hi, sweep.points);
    }

    [[nodiscard]] std::vector<double> beta_grid() const {
        return boundary.log_spacing ? logspace(boundary.beta_min, boundary.beta_max, boundary.points)
                                    : linspace(boundary.beta_min, boundary.beta_max, boundary.points);
    }

    void validate() const {
        params.validate();
        auto require = [](bool ok, const char* what) {
            if (!ok) throw ValidationError(what);
        };
        require(!(delta_c_given && cpa_auto_detuning), "delta_c and cpa_auto_detuning=true are mutually exclusive");
        const int drives = (params.omega_d != 0.0) + input_intensity.has_value() + cpa_drive;
        require(drives <= 1, "omega_d, input_intensity and cpa_drive are mutually exclusive");
        require(!input_intensity || (std::isfinite(*input_intensity) && *input_intensity >= 0.0),
                "input_intensity must be nonnegative");
        require(std::isfinite(sweep.i_min) && sweep.i_min >= 0.0, "sweep.i_min must be nonnegative");
        require(!sweep.i_max || (std::isfinite(*sweep.i_max) && *sweep.i_max > sweep.i_min),
                "sweep.i_max must exceed sweep.i_min");
        require(sweep.points >= 2, "sweep.points must be at least 2");
        require(std::isfinite(boundary.g_fixed) && boundary.g_fixed >= 0.0, "boundary.g_fixed must be nonnegative");
        require(std::isfinite(boundary.delta_tls_fixed), "boundary.delta_tls_fixed must be finite");
        require(std::isfinite(boundary.beta_min) && boundary.beta_min > 0.0, "boundary.beta_min must be positive");
        require(std::isfinite(boundary.beta_max) && boundary.beta_max > boundary.beta_min,
                "boundary.beta_max must exceed boundary.beta_min");
        require(boundary.points >= 2, "boundary.points must be at least 2");
        require(!evolve.deltas.empty(), "evolve.deltas must not be empty");
        for (double d : evolve.deltas) require(std::isfinite(d), "evolve.deltas must be finite");
        require(std::isfinite(evolve.t_end) && evolve.t_end > 0.0, "evolve.t_end must be positive");
        require(std::isfinite(evolve.sample_dt) && evolve.sample_dt > 0.0, "evolve.sample_dt must be positive");
        if (evolve.initial)
            for (double x : *evolve.initial) require(std::isfinite(x), "evolve.initial must be finite");
        require(tol_res > 0.0, "tolerances.res must be positive");
        require(tol_stab > 0.0, "tolerances.stab must be positive");
    }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Reads the members of one JSON object, rejecting keys it was not asked for.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ParseError(where() + ": expected an object");
    }

    bool has(const char* key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    double number(const char* key, double fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ParseError(where(key) + ": expected a number");
        return v.get<double>();
    }

    std::size_t count(const char* key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned()) throw ParseError(where(key) + ": expected a nonnegative integer");
        return v.get<std::size_t>();
    }

    bool boolean(const char* key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ParseError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const char* key, const std::vector<double>& fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ParseError(where(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ParseError(where(key) + ": expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    const nlohmann::json& child(const char* key) { return j_.at(key); }

    std::string path(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

    /// Throws on the first key that no accessor asked about.
    void finish() const {
        for (const auto& [k, _] : j_.items())
            if (!seen_.contains(k)) throw ParseError(where(k.c_str()) + ": unknown key");
    }

private:
    std::string where() const { return "key '" + (path_.empty() ? std::string("<root>") : path_) + "'"; }
    std::string where(const char* key) const { return "key '" + path(key) + "'"; }

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

} // namespace detail

/// Parses and validates a JSON run configuration.
///
/// Layout (every key optional):
///   { "params": {gamma, kappa_l, kappa_r, g, delta_c, delta_tls, g_nl_mag, phi, omega_d},
///     "cpa_auto_detuning": bool, "input_intensity": number, "cpa_drive": bool,
///     "sweep": {i_min, i_max, points},
///     "boundary": {g_fixed, delta_tls_fixed, beta_min, beta_max, points, log_spacing},
///     "evolve": {deltas: [..], t_end, sample_dt, initial: [5 numbers]},
///     "tolerances": {res, stab} }
inline RunConfig parse_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream os;
        os << "line " << line << ", column " << col << ": malformed JSON (" << e.what() << ")";
        throw ParseError(os.str());
    }

    RunConfig c;
    detail::ObjectReader top(root, "");
    if (top.has("params")) {
        detail::ObjectReader r(top.child("params"), "params");
        SystemParams& p = c.params;
        p.gamma = r.number("gamma", p.gamma);
        p.kappa_l = r.number("kappa_l", p.kappa_l);
        p.kappa_r = r.number("kappa_r", p.kappa_r);
        p.g = r.number("g", p.g);
        c.delta_c_given = r.has("delta_c");
        p.delta_c = r.number("delta_c", p.delta_c);
        p.delta_tls = r.number("delta_tls", p.delta_tls);
        p.g_nl_mag = r.number("g_nl_mag", p.g_nl_mag);
        p.phi = r.number("phi", p.phi);
        p.omega_d = r.number("omega_d", p.omega_d);
        r.finish();
    }
    c.cpa_auto_detuning = top.boolean("cpa_auto_detuning", false);
    if (top.has("input_intensity")) c.input_intensity = top.number("input_intensity", 0.0);
    c.cpa_drive = top.boolean("cpa_drive", false);
    if (top.has("sweep")) {
        detail::ObjectReader r(top.child("sweep"), "sweep");
        c.sweep.i_min = r.number("i_min", c.sweep.i_min);
        if (r.has("i_max")) c.sweep.i_max = r.number("i_max", 0.0);
        c.sweep.points = r.count("points", c.sweep.points);
        r.finish();
    }
    if (top.has("boundary")) {
        detail::ObjectReader r(top.child("boundary"), "boundary");
        auto& b = c.boundary;
        b.g_fixed = r.number("g_fixed", b.g_fixed);
        b.delta_tls_fixed = r.number("delta_tls_fixed", b.delta_tls_fixed);
        b.beta_min = r.number("beta_min", b.beta_min);
        b.beta_max = r.number("beta_max", b.beta_max);
        b.points = r.count("points", b.points);
        b.log_spacing = r.boolean("log_spacing", b.log_spacing);
        r.finish();
    }
    if (top.has("evolve")) {
        detail::ObjectReader r(top.child("evolve"), "evolve");
        auto& e = c.evolve;
        e.deltas = r.numbers("deltas", e.deltas);
        e.t_end = r.number("t_end", e.t_end);
        e.sample_dt = r.number("sample_dt", e.sample_dt);
        if (r.has("initial")) {
            const auto v = r.numbers("initial", {});
            if (v.size() != 5) throw ParseError("key 'evolve.initial': expected 5 numbers (Re c, Im c, Re s, Im s, s_z)");
            MeanFieldState s{};
            std::copy(v.begin(), v.end(), s.begin());
            e.initial = s;
        }
        r.finish();
    }
    if (top.has("tolerances")) {
        detail::ObjectReader r(top.child("tolerances"), "tolerances");
        c.tol_res = r.number("res", c.tol_res);
        c.tol_stab = r.number("stab", c.tol_stab);
        r.finish();
    }
    top.finish();
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Inverse of parse_config: every field is written, so the document
/// reparses to an equal RunConfig.
inline std::string serialize_config(const RunConfig& c) {
    nlohmann::ordered_json j;
    auto& p = j["params"];
    p["gamma"] = c.params.gamma;
    p["kappa_l"] = c.params.kappa_l;
    p["kappa_r"] = c.params.kappa_r;
    p["g"] = c.params.g;
    if (c.delta_c_given) p["delta_c"] = c.params.delta_c;
    p["delta_tls"] = c.params.delta_tls;
    p["g_nl_mag"] = c.params.g_nl_mag;
    p["phi"] = c.params.phi;
    p["omega_d"] = c.params.omega_d;
    j["cpa_auto_detuning"] = c.cpa_auto_detuning;
    if (c.input_intensity) j["input_intensity"] = *c.input_intensity;
    j["cpa_drive"] = c.cpa_drive;
    auto& s = j["sweep"];
    s["i_min"] = c.sweep.i_min;
    if (c.sweep.i_max) s["i_max"] = *c.sweep.i_max;
    s["points"] = c.sweep.points;
    auto& b = j["boundary"];
    b["g_fixed"] = c.boundary.g_fixed;
    b["delta_tls_fixed"] = c.boundary.delta_tls_fixed;
    b["beta_min"] = c.boundary.beta_min;
    b["beta_max"] = c.boundary.beta_max;
    b["points"] = c.boundary.points;
    b["log_spacing"] = c.boundary.log_spacing;
    auto& e = j["evolve"];
    e["deltas"] = c.evolve.deltas;
    e["t_end"] = c.evolve.t_end;
    e["sample_dt"] = c.evolve.sample_dt;
    if (c.evolve.initial) e["initial"] = std::vector<double>(c.evolve.initial->begin(), c.evolve.initial->end());
    j["tolerances"]["res"] = c.tol_res;
    j["tolerances"]["stab"] = c.tol_stab;
    return j.dump(2) + "\n";
}

} // namespace cpasim
