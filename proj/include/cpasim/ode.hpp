#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace cpasim::ode {

struct Tolerances {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  ///< 0 selects a starting step automatically
    double h_max = std::numeric_limits<double>::infinity();
    long long max_steps = 200'000'000;
};

template <std::size_t N>
struct Result {
    bool ok = true;
    std::string message;
    double t = 0.0;  ///< time actually reached
    long long accepted = 0;
    long long rejected = 0;
    std::array<double, N> y{};  ///< state at `t`
};

namespace dp5 {
// Dormand-Prince 5(4) tableau and the continuous extension of Hairer & Wanner.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
} // namespace dp5

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t_end.
/// `observe(t, y)` is called for every sample time t_k = t0 + k*sample_dt
/// (k = 0, 1, ...) up to t_end, evaluated from the continuous extension so
/// the step sequence does not depend on the sampling grid.
template <std::size_t N, class F, class Observer>
Result<N> integrate_dense(F&& f, double t0, std::array<double, N> y, double t_end, double sample_dt, Observer&& observe,
                       const Tolerances& tol = {}) {
    using State = std::array<double, N>;
    using namespace dp5;

    Result<N> res;
    res.t = t0;
    long long next_k = 0;
    auto sample_time = [&](long long k) { return t0 + static_cast<double>(k) * sample_dt; };
    const double t_stop = t_end * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());

    auto err_scale = [&](const State& a, const State& b, std::size_t i) {
        return tol.atol + tol.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    };
    auto finite = [](const State& s) {
        return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
    };

    State k1 = f(t0, y);
    double t = t0;

    while (next_k >= 0 && sample_time(next_k) <= t0) {
        observe(sample_time(next_k), y);
        ++next_k;
    }

    double h = tol.h_init;
    if (h <= 0.0) {
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol.atol + tol.rtol * std::abs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1n += (k1[i] / sk) * (k1[i] / sk);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min(h, t_end - t0);
    }
    h = std::min(h, tol.h_max);

    State k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double fac_old = 1e-4;
    bool last_rejected = false;

    while (t < t_end) {
        if (res.accepted + res.rejected >= tol.max_steps) {
            res.ok = false;
            res.message = "step budget exhausted";
            break;
        }
        bool last = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }
        if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
            res.ok = false;
            res.message = "step size underflow at t=" + std::to_string(t);
            break;
        }

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        k2 = f(t + c2 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(t + h, ytmp);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double r = e / err_scale(y, ynew, i);
            err += r * r;
        }
        err = std::sqrt(err / N);

        if (!std::isfinite(err) || !finite(ynew)) {
            ++res.rejected;
            h *= 0.1;
            last_rejected = true;
            continue;
        }

        if (err <= 1.0) {
            // Continuous extension on [t, t + h].
            State r1 = y, r2, r3, r4, r5;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                r2[i] = ydiff;
                r3[i] = bspl;
                r4[i] = ydiff - h * k7[i] - bspl;
                r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            const double t_next = last ? t_end : t + h;
            const double t_lim = last ? t_stop : t_next;
            for (double ts = sample_time(next_k); ts <= t_lim; ts = sample_time(next_k)) {
                const double th = std::min((ts - t) / h, 1.0);
                const double th1 = 1.0 - th;
                State ys;
                for (std::size_t i = 0; i < N; ++i)
                    ys[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
                observe(ts, ys);
                ++next_k;
            }

            ++res.accepted;
            t = t_next;
            y = ynew;
            k1 = k7;
            double fac = 0.9 * std::pow(err, -0.17) * std::pow(fac_old, 0.04);  // PI control
            fac = std::clamp(fac, 0.2, 10.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            fac_old = std::max(err, 1e-4);
            h = std::min(h * fac, tol.h_max);
            last_rejected = false;
        } else {
            ++res.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    res.t = t;
    res.y = y;
    return res;
}

} // namespace cpasim::ode
