#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/Polynomials>

#include <cpasim/polynomial.hpp>

using cpasim::Polynomial;
using cpasim::real_roots;

namespace {

Polynomial from_roots(const std::vector<double>& roots, double lead = 1.0) {
    Polynomial p{lead};
    for (double r : roots) p = p * Polynomial{-r, 1.0};
    return p;
}

} // namespace

TEST(Polynomial, ArithmeticAndEvaluation) {
    const Polynomial a{1.0, 2.0};       // 1 + 2x
    const Polynomial b{-1.0, 0.0, 3.0}; // -1 + 3x^2
    const auto s = a + b;
    EXPECT_EQ(s.degree(), 2);
    EXPECT_DOUBLE_EQ(s(2.0), 5.0 + 11.0);
    const auto d = a - a;
    EXPECT_LE(d.degree(), 0);
    EXPECT_DOUBLE_EQ(d(3.0), 0.0);
    const auto m = a * b;
    EXPECT_EQ(m.degree(), 3);
    for (double x : {-2.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(m(x), a(x) * b(x));
    const auto der = m.derivative();
    EXPECT_EQ(der.degree(), 2);
    // d/dx (1 + 2x)(-1 + 3x^2) = 2(-1 + 3x^2) + 6x(1 + 2x)
    EXPECT_DOUBLE_EQ(der(1.5), 2.0 * (-1.0 + 6.75) + 9.0 * 4.0);
    EXPECT_DOUBLE_EQ((2.0 * a)(1.0), 6.0);
    EXPECT_DOUBLE_EQ(m.magnitude(-1.0), 1 * 1 + 2 * 1 + 3 * 1 + 6 * 1);
}

TEST(Polynomial, CauchyBoundContainsAllRoots) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> r{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto p = from_roots(r, 0.3);
        const double bound = cpasim::cauchy_root_bound(p);
        for (double x : r) EXPECT_LE(std::abs(x), bound);
    }
}

TEST(Polynomial, FindsSeparatedRoots) {
    const auto p = from_roots({-3.0, 0.25, 1.0, 7.5, 40.0}, 2.0);
    const auto r = real_roots(p, -100.0, 100.0);
    ASSERT_EQ(r.size(), 5u);
    const std::vector<double> want{-3.0, 0.25, 1.0, 7.5, 40.0};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r[i], want[i], 1e-12 * std::max(1.0, want[i]));
}

TEST(Polynomial, RestrictsToInterval) {
    const auto p = from_roots({-3.0, 0.25, 1.0, 7.5, 40.0});
    const auto r = real_roots(p, 0.0, 10.0);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r.front(), 0.25, 1e-13);
}

TEST(Polynomial, ReportsTangentialRootOnce) {
    // (x - 2)^2 (x + 1) (x - 5): the double root has no sign change.
    const auto p = from_roots({2.0, 2.0, -1.0, 5.0});
    const auto r = real_roots(p, -10.0, 10.0);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[1], 2.0, 1e-7);
}

TEST(Polynomial, NoRealRoots) {
    const Polynomial p{1.0, 0.0, 1.0, 0.0, 1.0};  // 1 + x^2 + x^4
    EXPECT_TRUE(real_roots(p, -10.0, 10.0).empty());
}

TEST(Polynomial, AgreesWithCompanionMatrixEigenvalues) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 300; ++k) {
        Eigen::Matrix<double, 6, 1> c;
        for (int i = 0; i < 6; ++i) c(i) = u(rng);
        Polynomial p{c(0), c(1), c(2), c(3), c(4), c(5)};
        Eigen::PolynomialSolver<double, 5> solver(c);
        std::vector<double> want;
        bool ambiguous = false;
        for (int i = 0; i < 5; ++i) {
            const auto z = solver.roots()(i);
            if (z.imag() == 0.0)
                want.push_back(z.real());
            else if (std::abs(z.imag()) < 1e-6)
                ambiguous = true;  // nearly a double root; the count is not well posed
        }
        std::sort(want.begin(), want.end());
        for (std::size_t i = 0; i + 1 < want.size(); ++i)
            if (want[i + 1] - want[i] < 1e-6) ambiguous = true;
        if (ambiguous) continue;
        const double bound = cpasim::cauchy_root_bound(p);
        const auto got = real_roots(p, -bound, bound);
        ASSERT_EQ(got.size(), want.size()) << "case " << k;
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8 * std::max(1.0, std::abs(want[i])));
    }
}
