#include "subdiff/fem1d.hpp"
#include "subdiff/problems.hpp"
#include "subdiff/selftest.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace subdiff;
using std::numbers::pi;

namespace {

double sinpi(double x) { return std::sin(pi * x); }

std::vector<double> unit(std::size_t n, std::size_t j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    return e;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

TEST(Mesh, Examples) {
    const auto m2 = make_mesh(2);
    EXPECT_EQ(m2.nodes(), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(m2.h(), 0.5);
    const auto m100 = make_mesh(100);
    EXPECT_DOUBLE_EQ(m100.h(), 0.01);
    EXPECT_EQ(m100.n_nodes(), 101u);
    const auto m3 = make_mesh(3);
    EXPECT_NEAR(m3.node(1), 1.0 / 3.0, 1e-16);
    EXPECT_NEAR(m3.node(2), 2.0 / 3.0, 1e-16);
    EXPECT_THROW(make_mesh(1), InvalidArgument);
    EXPECT_THROW(make_mesh(0), InvalidArgument);
}

TEST(Mesh, UniformSpacing) {
    for (std::size_t n : {2u, 7u, 100u, 1000u, 4096u}) {
        const Mesh1D m(n);
        EXPECT_EQ(m.node(0), 0.0);
        EXPECT_EQ(m.node(n), 1.0);
        for (std::size_t i = 0; i < n; ++i) ASSERT_LE(std::abs(m.node(i + 1) - m.node(i) - m.h()), 1e-14);
    }
}

TEST(FEFunction, EvaluatesThePiecewiseLinearInterpolant) {
    const Mesh1D m(4);
    const FEFunction u(m, {1.0, 2.0, -1.0});
    EXPECT_EQ(u(0.0), 0.0);
    EXPECT_EQ(u(1.0), 0.0);
    EXPECT_DOUBLE_EQ(u(0.25), 1.0);
    EXPECT_DOUBLE_EQ(u(0.375), 1.5);
    EXPECT_DOUBLE_EQ(u(0.875), -0.5);
    EXPECT_DOUBLE_EQ(u.slope(1), 4.0);
    EXPECT_THROW(FEFunction(m, {1.0}), InvalidArgument);
}

TEST(Mass, Examples) {
    const auto m1 = assemble_mass(Mesh1D(2));
    ASSERT_EQ(m1.dim(), 1u);
    EXPECT_NEAR(m1.diag()[0], 1.0 / 3.0, 1e-16);
    const auto m4 = assemble_mass(Mesh1D(4));
    for (double d : m4.diag()) EXPECT_NEAR(d, 1.0 / 6.0, 1e-16);
    for (double o : m4.off()) EXPECT_NEAR(o, 1.0 / 24.0, 1e-16);
    const auto m10 = assemble_mass(Mesh1D(10));
    for (std::size_t i = 1; i + 1 < m10.dim(); ++i) {
        EXPECT_NEAR(m10.diag()[i] + m10.off()[i - 1] + m10.off()[i], 0.1, 1e-15);
    }
}

TEST(Stiffness, ConstantAndLinearCoefficients) {
    const Mesh1D m(25);
    const double h = m.h();
    const auto k = assemble_stiffness(m, [](double, double) { return 1.0; }, 0.0);
    for (double d : k.diag()) EXPECT_NEAR(d, 2.0 / h, 1e-12);
    for (double o : k.off()) EXPECT_NEAR(o, -1.0 / h, 1e-12);

    // per-element integral of the linear D over [x_{i-1}, x_i] is h D(midpoint)
    const auto kl = assemble_stiffness(m, [](double x, double t) { return 1.0 + x + t; }, 0.0);
    for (std::size_t i = 0; i < kl.dim(); ++i) {
        const double xi = m.node(i + 1);
        EXPECT_NEAR(kl.diag()[i], 2.0 / h * (1.0 + xi), 1e-13 * 2.0 / h * (1.0 + xi));
        if (i + 1 < kl.dim()) {
            EXPECT_NEAR(kl.off()[i], -(1.0 + xi + h / 2.0) / h, 1e-13 / h);
        }
    }
}

TEST(Stiffness, QuadraticCoefficientExact) {
    const Mesh1D m(9);
    const double h = m.h();
    const auto k = assemble_stiffness(m, [](double x, double) { return 3.0 * x * x - x + 2.0; }, 0.0);
    auto prim = [](double x) { return x * x * x - 0.5 * x * x + 2.0 * x; };
    for (std::size_t i = 0; i < k.dim(); ++i) {
        const double want = (prim(m.node(i + 2)) - prim(m.node(i))) / (h * h);
        EXPECT_NEAR(k.diag()[i], want, 1e-13 * want);
        if (i + 1 < k.dim()) {
            const double wo = -(prim(m.node(i + 2)) - prim(m.node(i + 1))) / (h * h);
            EXPECT_NEAR(k.off()[i], wo, 1e-13 * std::abs(wo));
        }
    }
}

TEST(Stiffness, NonFiniteCoefficientNamesTheElement) {
    const Mesh1D m(10);
    try {
        (void)assemble_stiffness(m, [](double x, double) { return x > 0.65 ? std::nan("") : 1.0; }, 0.0);
        FAIL() << "expected AssemblyError";
    } catch (const AssemblyError& e) {
        EXPECT_EQ(e.element(), 6u);
    }
}

TEST(Operators, SymmetricPositiveDefiniteForEveryAdmissibleCoefficient) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Mesh1D m(33);
    const auto mass = assemble_mass(m);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto k = assemble_stiffness(m, problem_data::kinked_diffusivity, t);
        EXPECT_NO_THROW(solve_tridiag(k, std::vector<double>(k.dim(), 1.0)));
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> v(m.n_interior());
            for (double& x : v) x = u(rng);
            ASSERT_GT(k.quadratic_form(v), 0.0);
            ASSERT_GT(mass.quadratic_form(v), 0.0);
        }
    }
}

TEST(Load, Examples) {
    const Mesh1D m(12);
    for (double v : assemble_load(m, [](double) { return 0.0; })) EXPECT_EQ(v, 0.0);
    for (double v : assemble_load(m, [](double) { return 1.0; })) EXPECT_NEAR(v, m.h(), 1e-15);
    const auto mass = assemble_mass(m);
    const std::size_t j = 5;
    const FEFunction hat(m, unit(m.n_interior(), j));
    const auto col = assemble_load(m, [&](double x) { return hat(x); });
    for (std::size_t i = 0; i < col.size(); ++i) {
        double want = 0.0;
        if (i == j) want = mass.diag()[j];
        if (i + 1 == j) want = mass.off()[i];
        if (i == j + 1) want = mass.off()[j];
        EXPECT_NEAR(col[i], want, 1e-15);
    }
    EXPECT_THROW(assemble_load(m, [](double) { return std::numeric_limits<double>::infinity(); }),
                 AssemblyError);
}

TEST(Load, QuadraticDataExact) {
    const Mesh1D m(7);
    const double h = m.h();
    const auto l = assemble_load(m, [](double x) { return 5.0 * x * x - 3.0 * x + 1.0; });
    for (std::size_t i = 0; i < l.size(); ++i) {
        const double xi = m.node(i + 1);
        const double want = 5.0 * h * (xi * xi + h * h / 6.0) - 3.0 * h * xi + h;
        EXPECT_NEAR(l[i], want, 1e-13);
    }
}

TEST(Tridiagonal, AgainstDenseEliminationOnRandomSpdSystems) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng() % 60);
        std::vector<double> diag(n), off(n - 1), rhs(n);
        for (double& v : off) v = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0) +
                      0.05 + std::abs(u(rng));
            rhs[i] = u(rng);
        }
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            dense[i][i] = diag[i];
            if (i + 1 < n) dense[i][i + 1] = dense[i + 1][i] = off[i];
        }
        const auto x = solve_tridiag(TriDiagonalOperator(diag, off), rhs);
        const auto ref = selftest::oracle::dense_solve(dense, rhs);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += (x[i] - ref[i]) * (x[i] - ref[i]);
            den += ref[i] * ref[i];
        }
        ASSERT_LE(std::sqrt(num / den), 1e-10);
    }
}

TEST(Tridiagonal, ResidualBoundOnMeshSystems) {
    const Mesh1D m(500);
    const auto a = assemble_stiffness(m, problem_data::kinked_diffusivity, 0.3)
                       .combine(1.0, assemble_mass(m), 1e4);
    std::vector<double> rhs(a.dim());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::sin(0.1 * static_cast<double>(i));
    const auto x = solve_tridiag(a, rhs);
    const auto ax = a.apply(x);
    double res = 0.0, xn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        res = std::max(res, std::abs(ax[i] - rhs[i]));
        xn = std::max(xn, std::abs(x[i]));
        bn = std::max(bn, std::abs(rhs[i]));
    }
    EXPECT_LE(res, 1e-12 * (a.norm_inf() * xn + bn));
}

TEST(Tridiagonal, SmallExamplesAndFailures) {
    EXPECT_EQ(solve_tridiag(TriDiagonalOperator({1.0}, {}), std::vector<double>{4.0})[0], 4.0);
    EXPECT_NEAR(solve_tridiag(assemble_mass(Mesh1D(2)), std::vector<double>{1.0})[0], 3.0, 1e-15);
    EXPECT_THROW(solve_tridiag(TriDiagonalOperator({1.0, 1.0}, {1.0}), std::vector<double>{1.0, 0.0}),
                 NotSpdError);
    EXPECT_THROW(solve_tridiag(TriDiagonalOperator({-1.0}, {}), std::vector<double>{1.0}), NotSpdError);
    EXPECT_THROW(solve_tridiag(TriDiagonalOperator({1.0}, {}), std::vector<double>{1.0, 1.0}),
                 InvalidArgument);
    EXPECT_THROW(TriDiagonalOperator({1.0, 2.0}, {}), InvalidArgument);
}

TEST(L2Projection, IdentityOnTheFiniteElementSpace) {
    const Mesh1D m(20);
    const FEFunction v(m, [&] {
        std::vector<double> c(m.n_interior());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::cos(1.7 * static_cast<double>(i));
        return c;
    }());
    const auto p = l2_project(m, [&](double x) { return v(x); });
    for (std::size_t i = 0; i < v.coeffs().size(); ++i) EXPECT_NEAR(p.coeffs()[i], v.coeffs()[i], 1e-12);
}

TEST(L2Projection, SecondOrderOnSmoothData) {
    std::vector<double> errs;
    for (std::size_t n = 16; n <= 256; n *= 2) errs.push_back(l2_distance(l2_project(Mesh1D(n), sinpi), sinpi));
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) EXPECT_GE(order(errs[i], errs[i + 1]), 1.95);
}

TEST(L2Projection, GalerkinOrthogonalityAndStability) {
    const Mesh1D m(31);
    const auto p = l2_project(m, problem_data::sqrt_bump);
    const auto lhs = assemble_mass(m).apply(p.coeffs());
    const auto rhs = assemble_load(m, problem_data::sqrt_bump);
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-10);
    for (std::size_t n : {3u, 10u, 64u, 255u}) {
        EXPECT_LE(l2_norm(l2_project(Mesh1D(n), problem_data::step)), std::sqrt(0.5) + 1e-10);
    }
}

TEST(RitzProjection, InterpolatesInOneDimensionForTheLaplacian) {
    for (std::size_t n : {2u, 5u, 50u}) {
        const Mesh1D m(n);
        const auto r = ritz_project(m, [](double, double) { return 1.0; }, 0.0,
                                    [](double x) { return 1.0 - 2.0 * x; });
        for (std::size_t i = 0; i < r.coeffs().size(); ++i) {
            EXPECT_NEAR(r.coeffs()[i], problem_data::smooth_bump(m.node(i + 1)), 1e-11);
        }
    }
}

TEST(RitzProjection, IdentityOnFiniteElementSpaceAndOrthogonality) {
    const Mesh1D m(17);
    const auto v = interpolate(m, [](double x) { return std::exp(x) * x * (1.0 - x); });
    const auto dv = [&](double x) { return v.derivative(x); };
    const auto r = ritz_project(m, problem_data::kinked_diffusivity, 0.7, dv);
    for (std::size_t i = 0; i < r.coeffs().size(); ++i) EXPECT_NEAR(r.coeffs()[i], v.coeffs()[i], 1e-11);

    // a(D; v - R_h v, phi_i) for a non-discrete v, by a fine independent quadrature
    const auto w = [](double x) { return pi * std::cos(pi * x); };
    const auto rs = ritz_project(m, problem_data::kinked_diffusivity, 0.7, w);
    const double h = m.h();
    for (std::size_t i = 1; i < m.n_nodes() - 1; ++i) {
        double acc = 0.0;
        for (std::size_t e : {i - 1, i}) {
            const double sign = (e == i - 1) ? 1.0 / h : -1.0 / h;
            const double slope = rs.slope(e);
            constexpr int sub = 64;
            for (int q = 0; q < sub; ++q) {
                for (std::size_t g = 0; g < 3; ++g) {
                    const double hs = h / sub;
                    const double x = m.node(e) + (q + 0.5) * hs + 0.5 * hs * quad::gauss3_nodes[g];
                    acc += 0.5 * hs * quad::gauss3_weights[g] * problem_data::kinked_diffusivity(x, 0.7) *
                           (w(x) - slope) * sign;
                }
            }
        }
        EXPECT_LE(std::abs(acc), 5e-8) << i;  // assembly uses 3-point Gauss: O(h^7) here
    }
}

TEST(RitzProjection, SecondOrderWithKinkedDiffusivity) {
    std::vector<double> errs;
    for (std::size_t n = 16; n <= 256; n *= 2) {
        const auto r = ritz_project(Mesh1D(n), problem_data::kinked_diffusivity, 0.0,
                                    [](double x) { return pi * std::cos(pi * x); });
        errs.push_back(l2_distance(r, sinpi));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) EXPECT_GE(order(errs[i], errs[i + 1]), 1.9);
}

TEST(ErrorNorms, Examples) {
    const Mesh1D coarse(4), fine(256);
    const FEFunction z(coarse, std::vector<double>(3, 0.0));
    const auto s = interpolate(fine, sinpi);
    const auto e = fe_error_norms(z, s);
    EXPECT_NEAR(e.l2, 1.0 / std::sqrt(2.0), 1e-3);
    EXPECT_NEAR(e.h1_semi, pi / std::sqrt(2.0), 1e-3);
    const auto same = fe_error_norms(s, s);
    EXPECT_LE(same.l2, 1e-14);
    EXPECT_LE(same.h1_semi, 1e-12);
    std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
    for (double& v : c) v *= -2.0;
    const auto e2 = fe_error_norms(z, FEFunction(fine, c));
    EXPECT_NEAR(e2.l2, 2.0 * e.l2, 1e-14);
    EXPECT_NEAR(e2.h1_semi, 2.0 * e.h1_semi, 1e-13);
    EXPECT_THROW(fe_error_norms(FEFunction(Mesh1D(3), {0.0, 0.0}), s), InvalidArgument);
}

TEST(ErrorNorms, CoarseFunctionIsEvaluatedInsideFineElements) {
    // a coarse hat against zero on a 3x finer mesh: |hat|^2 = 2h/3, |hat'|^2 = 2/h
    const Mesh1D coarse(5), fine(15);
    const FEFunction hat(coarse, unit(4, 1));
    const auto e = fe_error_norms(hat, FEFunction(fine, std::vector<double>(14, 0.0)));
    EXPECT_NEAR(e.l2, std::sqrt(2.0 * 0.2 / 3.0), 1e-14);
    EXPECT_NEAR(e.h1_semi, std::sqrt(2.0 / 0.2), 1e-13);
}

TEST(ErrorNorms, InverseInequalityWitness) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Mesh1D m(2 + static_cast<std::size_t>(rng() % 100));
        std::vector<double> c(m.n_interior());
        for (double& v : c) v = u(rng);
        const auto n = fe_error_norms(FEFunction(m, std::vector<double>(c.size(), 0.0)), FEFunction(m, c));
        worst = std::max(worst, n.h1_semi * m.h() / n.l2);
        ASSERT_LE(n.h1_semi, (2.0 * std::sqrt(3.0) + 1e-9) / m.h() * n.l2);
    }
    EXPECT_GT(worst, 1.0);
}

TEST(Selftest, Fem1dSuitesPass) {
    for (const auto& s : selftest::suites) {
        if (s.module != "fem1d") continue;
        const auto r = s.run();
        EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
    }
}
