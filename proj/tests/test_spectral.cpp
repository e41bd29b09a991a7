#include "subdiff/problems.hpp"
#include "subdiff/selftest.hpp"
#include "subdiff/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace subdiff;
using std::numbers::pi;
using std::numbers::sqrt2;

TEST(SineCoeffs, FirstEigenfunction) {
    const auto e = sine_coeffs([](double x) { return sqrt2 * std::sin(pi * x); }, 100);
    ASSERT_EQ(e.size(), 100u);
    EXPECT_NEAR(e.coeff(1), 1.0, 1e-12);
    for (std::size_t n = 2; n <= 100; ++n) EXPECT_LT(std::abs(e.coeff(n)), 1e-10) << n;
    EXPECT_THROW((void)e.coeff(0), std::out_of_range);
}

TEST(SineCoeffs, StepMatchesClosedForm) {
    const auto e = sine_coeffs(problem_data::step, 1024);
    for (std::size_t n = 1; n <= 1024; ++n) {
        EXPECT_NEAR(e.coeff(n), selftest::oracle::step_coeff(n), 1e-12) << n;
    }
}

TEST(SineCoeffs, PolynomialClosedForm) {
    // x(1-x): c_n = 4 sqrt2 / (n pi)^3 for odd n, 0 for even n
    const auto e = sine_coeffs(problem_data::smooth_bump, 200);
    for (std::size_t n = 1; n <= 200; ++n) {
        const double k = static_cast<double>(n) * pi;
        const double want = (n % 2 == 1) ? 4.0 * sqrt2 / (k * k * k) : 0.0;
        EXPECT_NEAR(e.coeff(n), want, 1e-14) << n;
    }
}

TEST(SineCoeffs, SqrtBumpDecayFollowsBesselEnvelope) {
    const auto e = sine_coeffs(problem_data::sqrt_bump, 512);
    for (std::size_t n = 50; n <= 500; ++n) {
        const double scaled = std::abs(e.coeff(n)) * std::pow(static_cast<double>(n), 1.5);
        ASSERT_LT(scaled, 0.6) << n;
    }
    // c_n = sqrt2 sin(n pi/2) J_1(n pi/2) / (2n)
    for (std::size_t n : {1u, 3u, 51u, 101u, 301u}) {
        const double k = static_cast<double>(n) * pi / 2.0;
        const double want = sqrt2 * std::sin(k) * std::cyl_bessel_j(1.0, k) / (2.0 * static_cast<double>(n));
        EXPECT_NEAR(e.coeff(n), want, 1e-7) << n;
    }
}

TEST(SineCoeffs, BesselInequalityAndOrthonormality) {
    for (auto* v : {problem_data::smooth_bump, problem_data::tent, problem_data::sqrt_bump, problem_data::step}) {
        const auto e = sine_coeffs(v, 256);
        double s = 0.0;
        for (double c : e.coeffs()) s += c * c;
        double norm2 = 0.0;
        // ||v||^2 by a dense midpoint rule
        constexpr int m = 200'000;
        for (int i = 0; i < m; ++i) {
            const double x = (i + 0.5) / m;
            norm2 += v(x) * v(x) / m;
        }
        EXPECT_LE(s, norm2 + 1e-8);
    }
    for (std::size_t m = 1; m <= 16; ++m) {
        const auto e = sine_coeffs([m](double x) { return sqrt2 * std::sin(static_cast<double>(m) * pi * x); }, 16);
        for (std::size_t n = 1; n <= 16; ++n) EXPECT_NEAR(e.coeff(n), m == n ? 1.0 : 0.0, 1e-10);
    }
}

TEST(SineCoeffs, RejectsNonFiniteSamplesAndZeroModes) {
    EXPECT_THROW(sine_coeffs([](double) { return std::nan(""); }, 4), InvalidArgument);
    EXPECT_THROW(sine_coeffs(problem_data::step, 0), InvalidArgument);
}

TEST(HdotNorm, Examples) {
    EXPECT_NEAR(hdot_norm(SineExpansion({1.0}), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(hdot_norm(SineExpansion({1.0}), 1.0), pi, 1e-15);
    EXPECT_NEAR(hdot_norm(SineExpansion({1.0, 1.0}), 2.0), pi * pi * std::sqrt(17.0), 1e-13);
}

TEST(HdotNorm, MonotoneInSAndStableUnderTruncation) {
    const auto a = sine_coeffs(problem_data::smooth_bump, 512);
    const auto b = sine_coeffs(problem_data::smooth_bump, 1024);
    double prev = 0.0;
    for (double s = 0.0; s <= 2.0; s += 0.1) {
        const double v = hdot_norm(a, s);
        EXPECT_GE(v, prev);
        prev = v;
        EXPECT_LT(std::abs(hdot_norm(b, s) - v), 0.01 * v) << s;
    }
    // s = 1 recovers ||v'||^2 = 1/3 for x(1-x)
    EXPECT_NEAR(hdot_norm(b, 1.0), std::sqrt(1.0 / 3.0), 1e-6);
}

TEST(Smoothness, ClassifiesTheErrtimeData) {
    EXPECT_NEAR(estimate_smoothness(problem_data::smooth_bump), 2.0, 0.25);
    EXPECT_EQ(estimate_smoothness(problem_data::smooth_bump), smoothness_ceiling);
    EXPECT_NEAR(estimate_smoothness(problem_data::tent), 1.5, 0.15);
    EXPECT_NEAR(estimate_smoothness(problem_data::sqrt_bump), 1.0, 0.15);
    EXPECT_NEAR(estimate_smoothness(problem_data::step), 0.5, 0.1);
}

TEST(Smoothness, RegisteredLabelsAgree) {
    for (auto name : {"errtime1", "errtime2", "errtime3", "errtime4"}) {
        const auto p = get_problem(name, FracOrder(0.5));
        EXPECT_NEAR(estimate_smoothness(p.initial), p.p_nominal, 0.25) << name;
    }
}

TEST(Smoothness, DegenerateInputsRejected) {
    EXPECT_THROW(estimate_smoothness([](double) { return 0.0; }, 128), InvalidArgument);
    EXPECT_THROW(estimate_smoothness(problem_data::step, 32), InvalidArgument);
}

TEST(Selftest, SpectralSuitesPass) {
    for (const auto& s : selftest::suites) {
        if (s.module != "spectral") continue;
        const auto r = s.run();
        EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
    }
}
