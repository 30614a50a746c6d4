#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cpa.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "sweep.hpp"

namespace cpasim {

/// Conversion from gamma units to physical units for emitted files. Rates,
/// detunings, drives and fluxes scale with gamma, times with 1/gamma;
/// photon numbers and mean fields are dimensionless.
struct Units {
    double gamma = 1.0;

    [[nodiscard]] double rate(double x) const { return x * gamma; }
    [[nodiscard]] double time(double x) const { return x / gamma; }
    [[nodiscard]] double flux(double x) const { return x * gamma; }
};

/// 17 significant digits round-trip every double.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const HysteresisCurve& c, const Units& u = {}) {
    os << "input_intensity,n_c,output_intensity,stability,branch_id\n";
    for (const auto& pt : c.points)
        os << fmt(u.flux(pt.input_intensity)) << ',' << fmt(pt.n_c) << ',' << fmt(u.flux(pt.output_intensity)) << ','
           << to_string(pt.stability) << ',' << pt.branch_id << '\n';
}

inline void write_boundary_csv(std::ostream& os, const BoundaryMap& m, const Units& u = {}) {
    os << "beta,g_c,delta_tls_c,feasible\n";
    for (std::size_t i = 0; i < m.beta.size(); ++i)
        os << fmt(u.rate(m.beta[i])) << ',' << fmt(u.rate(m.g_c_curve[i])) << ','
           << (m.delta_c_exists[i] ? fmt(u.rate(m.delta_c_curve[i])) : std::string("nan")) << ','
           << (m.region_mask[i] ? 1 : 0) << '\n';
}

inline void write_trace_csv(std::ostream& os, const TimeTrace& t, const Units& u = {}) {
    os << "t,n_c,out_intensity\n";
    for (std::size_t i = 0; i < t.times.size(); ++i)
        os << fmt(u.time(t.times[i])) << ',' << fmt(t.n_c[i]) << ',' << fmt(u.flux(t.out_intensity[i])) << '\n';
}

/// Key/value pairs of a CPA report in emission order.
inline std::vector<std::pair<std::string, std::string>> cpa_fields(const CPAReport& r, const Units& u = {}) {
    std::string reasons;
    for (const auto& s : r.reasons) reasons += (reasons.empty() ? "" : ";") + s;
    const double nan = std::nan("");
    const auto& op = r.operating_point;
    return {
        {"beta", fmt(u.rate(r.beta))},
        {"g_c", fmt(u.rate(r.g_c))},
        {"delta_tls_c", fmt(u.rate(r.delta_tls_c))},
        {"cooperativity", fmt(r.cooperativity)},
        {"n_c_cpa", fmt(r.n_c_cpa)},
        {"delta_c_required", fmt(u.rate(r.delta_c_required))},
        {"delta_c_used", fmt(u.rate(r.delta_c_used))},
        {"omega_d_cpa", fmt(u.rate(r.omega_d_cpa))},
        {"input_intensity", fmt(u.flux(r.input_intensity))},
        {"feasible", r.feasible ? "1" : "0"},
        {"residual_out", fmt(u.flux(r.residual_out))},
        {"operating_n_c", fmt(op ? op->n_c : nan)},
        {"operating_stability", op ? to_string(op->stability) : "none"},
        {"branch_location", to_string(r.branch_location)},
        {"window_lo", fmt(r.window ? u.flux(r.window->lo) : nan)},
        {"window_hi", fmt(r.window ? u.flux(r.window->hi) : nan)},
        {"reasons", reasons.empty() ? "none" : reasons},
    };
}

inline void write_cpa_csv(std::ostream& os, const CPAReport& r, const Units& u = {}) {
    const auto f = cpa_fields(r, u);
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i].first;
    os << '\n';
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i].second;
    os << '\n';
}

inline void write_steady_csv(std::ostream& os, const SteadySolution& s, const Units& u = {}) {
    os << "n_c,c_re,c_im,sigma_minus_re,sigma_minus_im,sigma_z,stability,max_real_eigenvalue,residual\n";
    for (const auto& st : s.states)
        os << fmt(st.n_c) << ',' << fmt(st.c_bar.real()) << ',' << fmt(st.c_bar.imag()) << ','
           << fmt(st.sigma_minus.real()) << ',' << fmt(st.sigma_minus.imag()) << ',' << fmt(st.sigma_z) << ','
           << to_string(st.stability) << ',' << fmt(u.rate(st.margin)) << ',' << fmt(st.residual) << '\n';
}

/// Runs `write` against a freshly truncated file.
template <class Writer>
void write_file(const std::string& path, Writer&& write) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write(out);
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Output file name for one mismatch value, e.g. evolve_delta0.1.csv.
inline std::string delta_suffix(double delta) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "delta%.6g", delta);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("no column '" + name + "'");
    }
};

/// Reader for the unquoted CSV this library emits.
inline CsvTable read_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (!line.empty() && line.back() == ',') out.emplace_back();
        return out;
    };
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            t.header = split(line);
            continue;
        }
        auto row = split(line);
        if (row.size() != t.header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields, got " + std::to_string(row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// strtod rather than stod: subnormal values are valid emitted numbers.
inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("not a number: '" + s + "'");
    return v;
}

} // namespace cpasim
