#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "mean_field.hpp"
#include "ode.hpp"
#include "params.hpp"

namespace cpasim {

struct TimeTrace {
    double delta = 0.0;  ///< pump mismatch the trace was run with
    double input_intensity = 0.0;
    std::vector<double> times;
    std::vector<double> n_c;
    std::vector<double> out_intensity;  ///< left-port |c_out|^2
    MeanFieldState state_final{};
    /// Set when the step controller gave up; the trace stops at the last
    /// time it reached.
    std::optional<std::string> failure;
};

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    long long max_steps = 200'000'000;
};

/// Time evolution of the mean-field equations with the drive switched on at
/// t = 0, sampled every sample_dt on the grid k * sample_dt.
inline TimeTrace integrate(const SystemParams& p, double delta, const MeanFieldState& initial, double t_end,
                           double sample_dt, const IntegrateOptions& opt = {}) {
    p.validate();
    if (!(t_end > 0.0)) throw PreconditionViolated("t_end must be positive");
    if (!(sample_dt > 0.0)) throw PreconditionViolated("sample_dt must be positive");

    TimeTrace tr;
    tr.delta = delta;
    const auto in = balanced_inputs(p, p.omega_d);
    tr.input_intensity = in.left * in.left;
    const double sk = std::sqrt(p.kappa_l);
    const auto n_samples = static_cast<std::size_t>(std::floor(t_end / sample_dt)) + 1;
    tr.times.reserve(n_samples);
    tr.n_c.reserve(n_samples);
    tr.out_intensity.reserve(n_samples);

    auto rhs = [&](double t, const MeanFieldState& y) { return mean_field_rhs(y, t, p, delta); };
    auto observe = [&](double t, const MeanFieldState& y) {
        const cplx c = field_of(y);
        tr.times.push_back(t);
        tr.n_c.push_back(std::norm(c));
        tr.out_intensity.push_back(std::norm(sk * c - in.left));
    };
    ode::Tolerances tol;
    tol.rtol = opt.rtol;
    tol.atol = opt.atol;
    tol.max_steps = opt.max_steps;
    const auto res = ode::integrate_dense(rhs, 0.0, initial, t_end, sample_dt, observe, tol);
    tr.state_final = res.y;
    if (!res.ok) tr.failure = res.message;
    return tr;
}

} // namespace cpasim
