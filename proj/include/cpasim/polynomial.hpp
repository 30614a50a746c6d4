#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <vector>

namespace cpasim {

/// Dense real polynomial, coefficients in ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

    [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return c_; }
    [[nodiscard]] bool is_zero() const noexcept { return c_.empty(); }
    /// Degree of the zero polynomial is reported as -1.
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] double coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }
    [[nodiscard]] double leading() const noexcept { return c_.empty() ? 0.0 : c_.back(); }

    [[nodiscard]] double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    /// sum |c_k| |x|^k, the natural floating-point error scale of p(x).
    [[nodiscard]] double magnitude(double x) const noexcept {
        double acc = 0.0;
        const double ax = std::abs(x);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
        return acc;
    }

    [[nodiscard]] Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.coeff(k) + b.coeff(k);
        return Polynomial(std::move(r));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }

    friend Polynomial operator*(double s, const Polynomial& a) {
        std::vector<double> r = a.c_;
        for (auto& v : r) v *= s;
        return Polynomial(std::move(r));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }

    std::vector<double> c_;
};

/// Cauchy bound: every root satisfies |x| <= 1 + max_k |c_k / c_n|.
inline double cauchy_root_bound(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1) return 0.0;
    double m = 0.0;
    for (int k = 0; k < n; ++k) m = std::max(m, std::abs(p.coeff(k) / p.leading()));
    return 1.0 + m;
}

namespace detail {

/// Bisection on a bracket [a, b] with p(a), p(b) of opposite sign, run until
/// the bracket stops shrinking in floating point.
inline double bisect_root(const Polynomial& p, double a, double b, double fa) {
    for (int it = 0; it < 400; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = p(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

inline void real_roots_rec(const Polynomial& p, double lo, double hi, std::vector<double>& out) {
    const int n = p.degree();
    if (n < 1) return;
    if (n == 1) {
        const double x = -p.coeff(0) / p.coeff(1);
        if (x >= lo && x <= hi) out.push_back(x);
        return;
    }
    // Roots of p' split [lo, hi] into intervals on which p is monotone.
    std::vector<double> crit;
    real_roots_rec(p.derivative(), lo, hi, crit);
    std::sort(crit.begin(), crit.end());

    std::vector<double> knots;
    knots.reserve(crit.size() + 2);
    knots.push_back(lo);
    for (double x : crit)
        if (x > lo && x < hi) knots.push_back(x);
    knots.push_back(hi);

    constexpr double touch_tol = 64.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        const double fa = p(a);
        const double fb = p(b);
        if (fa == 0.0) {
            out.push_back(a);
            continue;
        }
        if (fb == 0.0) continue;  // picked up as the left knot of the next interval, or below
        if ((fa < 0.0) != (fb < 0.0)) out.push_back(bisect_root(p, a, b, fa));
    }
    if (p(hi) == 0.0) out.push_back(hi);
    // Tangential (even-multiplicity) roots sit on critical points.
    for (double x : crit) {
        if (x < lo || x > hi) continue;
        if (std::abs(p(x)) <= touch_tol * p.magnitude(x)) out.push_back(x);
    }
}

} // namespace detail

/// All real roots of p in [lo, hi], ascending, with points closer than
/// merge_radius * max(1, |x|) merged. Even-multiplicity roots are reported
/// once, located at the critical point of p.
inline std::vector<double> real_roots(const Polynomial& p, double lo, double hi, double merge_radius = 1e-8) {
    std::vector<double> r;
    detail::real_roots_rec(p, lo, hi, r);
    std::sort(r.begin(), r.end());
    std::vector<double> merged;
    for (double x : r) {
        if (!merged.empty() && std::abs(x - merged.back()) <= merge_radius * std::max(1.0, std::abs(x))) continue;
        merged.push_back(x);
    }
    return merged;
}

} // namespace cpasim
