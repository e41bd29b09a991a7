#pragma once

// Oracle suites run by `subdiff selftest`. Every check compares the library
// against something computed along a different path: std::tgamma, std::erfc,
// dense elimination, closed-form integrals.

#include "subdiff/error.hpp"
#include "subdiff/fem1d.hpp"
#include "subdiff/fraccalc.hpp"
#include "subdiff/gamma.hpp"
#include "subdiff/problems.hpp"
#include "subdiff/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace subdiff::selftest {

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

/// Collects failed expectations of one suite.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (!ok && failures_.empty()) failures_ = what;
        if (!ok) ++failed_;
    }
    void near_rel(double got, double want, double tol, const std::string& what) {
        const double scale = std::max(std::abs(want), 1e-300);
        const double rel = std::abs(got - want) / scale;
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " (rel " << rel << " > " << tol << ")";
        expect(rel <= tol, os.str());
    }
    void near_abs(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " (abs tol " << tol << ")";
        expect(std::abs(got - want) <= tol, os.str());
    }
    SuiteResult result(std::string name) const {
        SuiteResult r{std::move(name), failed_ == 0, {}};
        std::ostringstream os;
        if (failed_ == 0) {
            os << count_ << " checks";
        } else {
            os << failed_ << "/" << count_ << " failed; first: " << failures_;
        }
        r.detail = os.str();
        return r;
    }

private:
    std::size_t count_ = 0;
    std::size_t failed_ = 0;
    std::string failures_;
};

namespace oracle {

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        }
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

/// E_{a,b}(z) by a Kahan-summed power series with std::tgamma.
inline double ml_series(double a, double b, double z) {
    // terms in log form so small alpha does not hit tgamma overflow before the peak
    double sum = 0.0;
    double comp = 0.0;
    const double lz = std::log(std::abs(z));
    for (int k = 0; k < 20000; ++k) {
        const double g = a * k + b;
        double term = k == 0 ? 1.0 / std::tgamma(b) : std::exp(k * lz - std::lgamma(g));
        if (k > 0 && z < 0.0 && k % 2) term = -term;
        if (z == 0.0 && k > 0) term = 0.0;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (k > 5 && a * k > std::abs(z) && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// E_{1/2}(z) = exp(z^2) erfc(-z).
inline double ml_half(double z) { return std::exp(z * z) * std::erfc(-z); }

/// Sine coefficient of the step 1_{[1/2,1]}.
inline double step_coeff(std::size_t n) {
    const double k = static_cast<double>(n) * std::numbers::pi;
    return std::numbers::sqrt2 * (std::cos(k / 2.0) - std::cos(k)) / k;
}

}  // namespace oracle

namespace detail {

inline std::vector<std::vector<double>> scalar_samples(double tau, std::size_t n,
                                                       const std::function<double(double)>& y) {
    std::vector<std::vector<double>> s;
    for (std::size_t k = 0; k <= n; ++k) s.push_back({y(tau * static_cast<double>(k))});
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// Smallest observed order over consecutive dyadic refinements.
inline double min_order(const std::vector<double>& errs) {
    double p = 1e300;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) p = std::min(p, std::log2(errs[i] / errs[i + 1]));
    return p;
}

inline constexpr std::array<double, 5> alphas = {0.1, 0.25, 0.5, 0.75, 0.9};

}  // namespace detail

inline SuiteResult suite_gamma() {
    Check c;
    double fact = 1.0;
    for (int n = 1; n <= 20; ++n) {
        c.near_rel(gamma_fn(n), fact, 1e-13, "Gamma(" + std::to_string(n) + ")");
        fact *= n;
    }
    c.near_rel(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-14, "Gamma(1/2)");
    c.near_rel(gamma_fn(-0.5), -2.0 * std::sqrt(std::numbers::pi), 1e-14, "Gamma(-1/2)");
    for (double x = 0.013; x < 171.0; x += 0.37) {
        c.near_rel(gamma_fn(x), std::tgamma(x), 1e-13, "Gamma vs tgamma");
    }
    c.expect(rgamma_fn(0.0) == 0.0 && rgamma_fn(-3.0) == 0.0, "1/Gamma vanishes at poles");
    return c.result("gamma");
}

inline SuiteResult suite_l1_weights() {
    Check c;
    for (double a : detail::alphas) {
        const auto w = l1_weights(FracOrder(a), 10'000);
        c.expect(w[0] == 1.0, "b_0 = 1");
        bool monotone = true;
        double sum = 0.0, comp = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (!(w[j] > 0.0) || (j > 0 && !(w[j] < w[j - 1]))) monotone = false;
            const double y = w[j] - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            const std::size_t n = j + 1;
            if (n == 1 || n == 10 || n == 100 || n == 1000 || n == 10'000) {
                c.near_rel(sum, std::pow(static_cast<double>(n), 1.0 - a), 1e-12, "sum b_j = n^(1-a)");
            }
        }
        c.expect(monotone, "weights positive and strictly decreasing");
    }
    const auto w = l1_weights(FracOrder(0.5), 2);
    c.near_rel(w[1], std::numbers::sqrt2 - 1.0, 1e-15, "b_1 at alpha = 1/2");
    const auto near_one = l1_weights(FracOrder(1.0 - 1e-12), 3);
    c.expect(std::abs(near_one[1]) < 1e-11 && std::abs(near_one[2]) < 1e-11, "alpha -> 1 limit");
    bool threw = false;
    try {
        (void)l1_weights(FracOrder(0.5), 0);
    } catch (const InvalidArgument&) {
        threw = true;
    }
    c.expect(threw, "n = 0 rejected");
    return c.result("l1-weights");
}

inline SuiteResult suite_caputo_l1() {
    Check c;
    for (double a : detail::alphas) {
        const FracOrder fa(a);
        for (double tau : {0.1, 1.0 / 64.0, 1e-3}) {
            const auto w = l1_weights(fa, 50);
            for (std::size_t n : {1u, 7u, 50u}) {
                const auto s = detail::scalar_samples(tau, n, [](double t) { return t; });
                const double got = caputo_l1_apply(w, tau, s)[0];
                c.near_rel(got, caputo_monomial(fa, 1.0, tau * static_cast<double>(n)), 1e-12,
                           "L1 exact on linears");
            }
            const auto s = detail::scalar_samples(tau, 10, [](double) { return 3.5; });
            c.expect(caputo_l1_apply(w, tau, s)[0] == 0.0, "L1 of a constant is zero");
        }
    }
    // t^2 at t = 1: error O(tau^(2-a))
    const FracOrder half(0.5);
    std::vector<double> errs;
    for (std::size_t n : {128u, 256u, 512u}) {
        const double tau = 1.0 / static_cast<double>(n);
        const auto s = detail::scalar_samples(tau, n, [](double t) { return t * t; });
        const double got = caputo_l1_apply(l1_weights(half, n), tau, s)[0];
        errs.push_back(std::abs(got - caputo_monomial(half, 2.0, 1.0)));
    }
    c.expect(errs.back() <= std::pow(1.0 / 512.0, 1.5), "L1 error on t^2 within tau^1.5");
    c.expect(detail::min_order(errs) >= 1.4, "L1 order on t^2 >= 2 - alpha - 0.1");
    c.near_rel(caputo_monomial(half, 2.0, 1.0), 1.50450555612735, 1e-12, "2 / Gamma(2.5)");
    return c.result("caputo-l1");
}

inline SuiteResult suite_frac_integral() {
    Check c;
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const double tau = 0.03;
        for (std::size_t n : {1u, 5u, 40u}) {
            const auto s = detail::scalar_samples(tau, n, [](double) { return 1.0; });
            const double t = tau * static_cast<double>(n);
            c.near_rel(frac_integral_apply(a, tau, s)[0], std::pow(t, a) / std::tgamma(a + 1.0), 1e-13,
                       "constants integrate exactly");
        }
    }
    // alpha = 1: right-rectangle rule
    const auto s = detail::scalar_samples(0.1, 4, [](double t) { return t * t; });
    const double rect = 0.1 * (0.01 + 0.04 + 0.09 + 0.16);
    c.near_rel(frac_integral_apply(1.0, 0.1, s)[0], rect, 1e-14, "alpha = 1 rectangle rule");

    // I^a applied to the L1 derivative recovers y - y(0) at rate min(1, 2 - a)
    for (double a : {0.25, 0.5, 0.75}) {
        std::vector<double> errs;
        for (std::size_t n : {128u, 256u, 512u, 1024u}) {
            const double tau = 1.0 / static_cast<double>(n);
            const auto y = detail::scalar_samples(tau, n, [](double t) { return t * t; });
            const auto w = l1_weights(FracOrder(a), n);
            std::vector<std::vector<double>> d{{0.0}};
            for (std::size_t k = 1; k <= n; ++k) {
                d.push_back(caputo_l1_apply(w, tau, std::span(y).first(k + 1)));
            }
            errs.push_back(std::abs(frac_integral_apply(a, tau, d)[0] - 1.0));
        }
        c.expect(detail::min_order(errs) >= std::min(1.0, 2.0 - a) - 0.1,
                 "composition identity order at alpha = " + std::to_string(a));
    }
    return c.result("frac-integral");
}

inline SuiteResult suite_discrete_positivity() {
    Check c;
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> g;
    for (double a : {0.25, 0.5, 0.75}) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(rng() % 30);
            const std::size_t dim = 1 + static_cast<std::size_t>(rng() % 3);
            const double tau = 1.0 / static_cast<double>(n);
            std::vector<std::vector<double>> u(n + 1, std::vector<double>(dim));
            double sup = 0.0;
            for (auto& v : u) {
                for (double& x : v) {
                    x = g(rng);
                    sup = std::max(sup, std::abs(x));
                }
            }
            double acc = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                acc += tau * detail::dot(frac_integral_apply(1.0 - a, tau, std::span(u).first(k + 1)), u[k]);
            }
            c.expect(acc >= -1e-10 * sup * sup, "tau sum <I^(1-a) u, u> >= 0");
        }
    }
    return c.result("discrete-positivity");
}

inline SuiteResult suite_discrete_inner_product() {
    Check c;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        const double a = detail::alphas[static_cast<std::size_t>(trial) % detail::alphas.size()];
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 25);
        const std::size_t dim = 1 + static_cast<std::size_t>(rng() % 4);
        const double tau = 1.0 / static_cast<double>(n);
        const auto w = l1_weights(FracOrder(a), n);
        std::vector<std::vector<double>> v(n + 1, std::vector<double>(dim, 0.0));
        std::vector<std::vector<double>> norms(n + 1, std::vector<double>(1, 0.0));
        for (std::size_t k = 1; k <= n; ++k) {
            for (double& x : v[k]) x = g(rng);
            norms[k][0] = detail::norm2(v[k]);
        }
        for (std::size_t k = 1; k <= n; ++k) {
            const double lhs = detail::dot(caputo_l1_apply(w, tau, std::span(v).first(k + 1)), v[k]);
            const double rhs = norms[k][0] * caputo_l1_apply(w, tau, std::span(norms).first(k + 1))[0];
            c.expect(lhs >= rhs - 1e-12, "<D v, v> >= |v| D|v|");
        }
    }
    return c.result("discrete-inner-product");
}

inline SuiteResult suite_mittag_leffler_values() {
    Check c;
    for (double a : {0.25, 0.5, 0.75, 1.0}) c.expect(mittag_leffler(a, 0.0) == 1.0, "E(0) = 1");
    c.near_rel(mittag_leffler(1.0, 1.0), std::numbers::e, 1e-15, "E_1(1) = e");
    c.near_rel(mittag_leffler(0.5, -1.0), 0.42758357615580700442, 1e-12, "E_1/2(-1) = e erfc(1)");
    for (double z = -25.0; z <= 5.0; z += 0.25) {
        c.near_rel(mittag_leffler(0.5, z), oracle::ml_half(z), 1e-10, "E_1/2 vs exp(z^2) erfc(-z)");
    }
    for (double a : {0.25, 0.5, 0.75, 0.9}) {
        for (double z = -1.0; z <= 5.0; z += 0.5) {
            c.near_rel(mittag_leffler(a, z), oracle::ml_series(a, 1.0, z), 1e-12,
                       "E_a vs Kahan series at alpha = " + std::to_string(a));
        }
    }
    for (double z : {-50.0, -10.0, -2.0, 0.5, 3.0}) {
        c.near_rel(mittag_leffler(1.0, z), std::exp(z), 1e-14, "E_1 = exp");
    }
    return c.result("mittag-leffler-values");
}

inline SuiteResult suite_mittag_leffler_seams() {
    Check c;
    for (double a : {0.25, 0.5, 0.75, 0.9}) {
        const double s = ml::series(a, 1.0, -1.0).value;
        const double q = ml::integral(a, 1.0, -1.0);
        c.near_rel(q, s, 1e-10, "series vs integral at z = -1");
        const double far = ml::integral(a, 1.0, -50.0);
        const auto asy = ml::asymptotic(a, 1.0, -50.0);
        c.near_rel(far, asy.value, std::max(1e-10, 2.0 * asy.error_bound / std::abs(asy.value)),
                   "integral vs asymptotic at z = -50");
        // complete monotonicity on the negative axis
        double prev = 1.0;
        bool dec = true;
        for (double z = -0.5; z >= -50.0; z -= 0.5) {
            const double v = mittag_leffler(a, z);
            if (!(v > 0.0 && v < prev)) dec = false;
            prev = v;
        }
        c.expect(dec, "E_a positive and decreasing on z < 0");
    }
    return c.result("mittag-leffler-seams");
}

inline SuiteResult suite_fem_assembly() {
    Check c;
    const Mesh1D m2(2);
    const auto mass2 = assemble_mass(m2);
    c.near_rel(mass2.diag()[0], 1.0 / 3.0, 1e-15, "mass, n = 2");
    const Mesh1D m4(4);
    const auto mass4 = assemble_mass(m4);
    c.near_rel(mass4.diag()[1], 1.0 / 6.0, 1e-15, "mass diag, h = 1/4");
    c.near_rel(mass4.off()[0], 1.0 / 24.0, 1e-15, "mass off, h = 1/4");

    const Mesh1D m(10);
    const double h = m.h();
    const auto k1 = assemble_stiffness(m, [](double, double) { return 1.0; }, 0.0);
    for (std::size_t i = 0; i < k1.dim(); ++i) c.near_rel(k1.diag()[i], 2.0 / h, 1e-13, "stiffness diag, D = 1");
    for (double v : k1.off()) c.near_rel(v, -1.0 / h, 1e-13, "stiffness off, D = 1");

    // D = 1 + x + t: element integral of a linear is its midpoint value times h
    const double t = 0.3;
    const auto kl = assemble_stiffness(m, [](double x, double tt) { return 1.0 + x + tt; }, t);
    for (std::size_t i = 0; i < kl.dim(); ++i) {
        const double xi = m.node(i + 1);
        const double left = 1.0 + (xi - h / 2.0) + t;
        const double right = 1.0 + (xi + h / 2.0) + t;
        c.near_rel(kl.diag()[i], (left + right) / h, 1e-13, "stiffness diag, D = 1 + x + t");
        if (i + 1 < kl.dim()) c.near_rel(kl.off()[i], -right / h, 1e-13, "stiffness off, D = 1 + x + t");
    }
    c.near_rel(kl.diag()[0], 2.0 / h * (1.0 + m.node(1) + t), 1e-13, "stiffness diag = 2/h D(x_i)");

    // quadratic D: int_e x^2 dx exact
    const auto kq = assemble_stiffness(m, [](double x, double) { return x * x; }, 0.0);
    for (std::size_t i = 0; i < kq.dim(); ++i) {
        const double a0 = m.node(i), a2 = m.node(i + 2);
        const double want = ((a2 * a2 * a2 - a0 * a0 * a0) / 3.0) / (h * h);
        c.near_rel(kq.diag()[i], want, 1e-13, "stiffness with D = x^2");
    }

    const auto ones = assemble_load(m, [](double) { return 1.0; });
    for (double v : ones) c.near_rel(v, h, 1e-14, "load of g = 1");
    const auto zeros = assemble_load(m, [](double) { return 0.0; });
    c.expect(std::all_of(zeros.begin(), zeros.end(), [](double v) { return v == 0.0; }), "load of g = 0");
    // g = x^2: (x^2, phi_i) = h (x_i^2 + h^2 / 6)
    const auto quad = assemble_load(m, [](double x) { return x * x; });
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const double xi = m.node(i + 1);
        c.near_rel(quad[i], h * (xi * xi + h * h / 6.0), 1e-13, "load of g = x^2");
    }
    // a hat as load gives a mass column
    const std::size_t j = 4;
    const auto hat = FEFunction(m, [&] {
        std::vector<double> e(m.n_interior(), 0.0);
        e[j] = 1.0;
        return e;
    }());
    const auto col = assemble_load(m, [&](double x) { return hat(x); });
    const auto mass = assemble_mass(m);
    c.near_rel(col[j], mass.diag()[j], 1e-14, "hat load = mass diag");
    c.near_rel(col[j + 1], mass.off()[j], 1e-14, "hat load = mass off");

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto kk = assemble_stiffness(m, problem_data::kinked_diffusivity, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(m.n_interior());
        for (double& x : v) x = u(rng);
        c.expect(mass.quadratic_form(v) > 0.0 && kk.quadratic_form(v) > 0.0, "operators positive definite");
    }
    return c.result("fem-assembly");
}

inline SuiteResult suite_tridiagonal() {
    Check c;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng() % 40);
        std::vector<double> off(n - 1), diag(n), rhs(n);
        for (double& v : off) v = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = i > 0 ? std::abs(off[i - 1]) : 0.0;
            const double hi = i + 1 < n ? std::abs(off[i]) : 0.0;
            diag[i] = lo + hi + 0.1 + std::abs(u(rng));
            rhs[i] = u(rng);
        }
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            dense[i][i] = diag[i];
            if (i + 1 < n) dense[i][i + 1] = dense[i + 1][i] = off[i];
        }
        const TriDiagonalOperator a(diag, off);
        const auto x = solve_tridiag(a, rhs);
        const auto ref = oracle::dense_solve(dense, rhs);
        double err = 0.0, nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            err = std::max(err, std::abs(x[i] - ref[i]));
            nrm = std::max(nrm, std::abs(ref[i]));
        }
        c.expect(err <= 1e-10 * nrm, "Thomas vs dense elimination");
        const auto ax = a.apply(x);
        double res = 0.0, xn = 0.0, bn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(ax[i] - rhs[i]));
            xn = std::max(xn, std::abs(x[i]));
            bn = std::max(bn, std::abs(rhs[i]));
        }
        c.expect(res <= 1e-12 * (a.norm_inf() * xn + bn), "residual bound");
    }
    const auto one = solve_tridiag(assemble_mass(Mesh1D(2)), std::vector<double>{1.0});
    c.near_rel(one[0], 3.0, 1e-15, "1x1 mass solve");
    bool threw = false;
    try {
        (void)solve_tridiag(TriDiagonalOperator({1.0, 1.0}, {2.0}), std::vector<double>{1.0, 1.0});
    } catch (const NotSpdError&) {
        threw = true;
    }
    c.expect(threw, "indefinite matrix rejected");
    return c.result("tridiagonal-solve");
}

inline SuiteResult suite_l2_projection() {
    Check c;
    using std::numbers::pi;
    const Mesh1D m(16);
    const auto in = interpolate(m, [](double x) { return std::sin(3.0 * x) * x * (1.0 - x); });
    const auto p = l2_project(m, [&](double x) { return in(x); });
    double d = 0.0;
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) d = std::max(d, std::abs(p.coeffs()[i] - in.coeffs()[i]));
    c.expect(d <= 1e-12, "projection is the identity on V_h");

    std::vector<double> errs;
    for (std::size_t n = 16; n <= 256; n *= 2) {
        const Mesh1D mesh(n);
        const auto s = [](double x) { return std::sin(pi * x); };
        errs.push_back(l2_distance(l2_project(mesh, s), s));
    }
    c.expect(detail::min_order(errs) >= 1.95, "L2 projection order on sin(pi x)");

    for (std::size_t n : {7u, 16u, 100u}) {
        const Mesh1D mesh(n);
        const auto ph = l2_project(mesh, problem_data::step);
        c.expect(l2_norm(ph) <= std::sqrt(0.5) + 1e-10, "projection of the step is L2 stable");
    }
    return c.result("l2-projection");
}

inline SuiteResult suite_ritz_projection() {
    Check c;
    using std::numbers::pi;
    const auto one = [](double, double) { return 1.0; };
    for (std::size_t n : {4u, 13u, 64u}) {
        const Mesh1D m(n);
        const auto r = ritz_project(m, one, 0.0, [](double x) { return 1.0 - 2.0 * x; });
        const auto in = interpolate(m, problem_data::smooth_bump);
        double d = 0.0;
        for (std::size_t i = 0; i < r.coeffs().size(); ++i) d = std::max(d, std::abs(r.coeffs()[i] - in.coeffs()[i]));
        c.expect(d <= 1e-11, "1D Ritz projection with D = 1 interpolates");
    }
    {
        const Mesh1D m(20);
        const auto in = interpolate(m, [](double x) { return std::sin(2.0 * x) * x * (1.0 - x); });
        const auto r = ritz_project(m, problem_data::kinked_diffusivity, 0.2,
                                    [&](double x) { return in.derivative(x); });
        double d = 0.0;
        for (std::size_t i = 0; i < r.coeffs().size(); ++i) d = std::max(d, std::abs(r.coeffs()[i] - in.coeffs()[i]));
        c.expect(d <= 1e-11, "Ritz projection is the identity on V_h");
    }
    std::vector<double> errs;
    for (std::size_t n = 16; n <= 256; n *= 2) {
        const Mesh1D m(n);
        const auto r = ritz_project(m, problem_data::kinked_diffusivity, 0.0,
                                    [](double x) { return pi * std::cos(pi * x); });
        errs.push_back(l2_distance(r, [](double x) { return std::sin(pi * x); }));
    }
    c.expect(detail::min_order(errs) >= 1.9, "Ritz projection order with the kinked diffusivity");
    return c.result("ritz-projection");
}

inline SuiteResult suite_error_norms() {
    Check c;
    using std::numbers::pi;
    const Mesh1D coarse(8), fine(256);
    const auto zero = FEFunction(coarse, std::vector<double>(coarse.n_interior(), 0.0));
    const auto s = interpolate(fine, [](double x) { return std::sin(pi * x); });
    const auto e = fe_error_norms(zero, s);
    c.near_abs(e.l2, 1.0 / std::numbers::sqrt2, 1e-3, "L2 norm of sin(pi x)");
    c.near_abs(e.h1_semi, pi / std::numbers::sqrt2, 1e-3, "H1 seminorm of sin(pi x)");
    const auto same = fe_error_norms(s, s);
    c.expect(same.l2 <= 1e-14 && same.h1_semi <= 1e-12, "identical functions");
    auto scaled_coeffs = std::vector<double>(s.coeffs().begin(), s.coeffs().end());
    for (double& v : scaled_coeffs) v *= -2.0;
    const auto e2 = fe_error_norms(zero, FEFunction(fine, scaled_coeffs));
    c.near_rel(e2.l2, 2.0 * e.l2, 1e-14, "homogeneity (L2)");
    c.near_rel(e2.h1_semi, 2.0 * e.h1_semi, 1e-14, "homogeneity (H1)");
    bool threw = false;
    try {
        (void)fe_error_norms(FEFunction(Mesh1D(3), std::vector<double>(2, 0.0)), s);
    } catch (const InvalidArgument&) {
        threw = true;
    }
    c.expect(threw, "non-nested meshes rejected");

    // inverse inequality |v|_1 <= 2 sqrt(3) / h |v|
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Mesh1D m(2 + static_cast<std::size_t>(rng() % 60));
        std::vector<double> v(m.n_interior());
        for (double& x : v) x = u(rng);
        const auto zm = FEFunction(m, std::vector<double>(m.n_interior(), 0.0));
        const auto n = fe_error_norms(zm, FEFunction(m, v));
        c.expect(n.h1_semi <= (2.0 * std::sqrt(3.0) + 1e-9) / m.h() * n.l2, "inverse inequality");
    }
    return c.result("error-norms");
}

inline SuiteResult suite_sine_coefficients() {
    Check c;
    using std::numbers::pi;
    const auto e = sine_coeffs([](double x) { return std::numbers::sqrt2 * std::sin(pi * x); }, 64);
    c.near_abs(e.coeff(1), 1.0, 1e-10, "c_1 of phi_1");
    double rest = 0.0;
    for (std::size_t n = 2; n <= 64; ++n) rest = std::max(rest, std::abs(e.coeff(n)));
    c.expect(rest < 1e-10, "higher modes of phi_1 vanish");

    const auto st = sine_coeffs(problem_data::step, 256);
    for (std::size_t n = 1; n <= 256; ++n) {
        c.near_abs(st.coeff(n), oracle::step_coeff(n), 1e-12, "step coefficients, closed form");
    }
    double bessel = 0.0;
    for (double v : st.coeffs()) bessel += v * v;
    c.expect(bessel <= 0.5 + 1e-8, "Bessel inequality for the step");

    const auto sq = sine_coeffs(problem_data::sqrt_bump, 512);
    double bound = 0.0;
    for (std::size_t n = 50; n <= 500; ++n) {
        bound = std::max(bound, std::abs(sq.coeff(n)) * std::pow(static_cast<double>(n), 1.5));
    }
    c.expect(bound < 1.0, "sqrt bump: n^(3/2) |c_n| bounded");

    // orthonormality of phi_1..phi_16 under the coefficient quadrature
    for (std::size_t m = 1; m <= 16; ++m) {
        const auto row = sine_coeffs(
            [m](double x) { return std::numbers::sqrt2 * std::sin(static_cast<double>(m) * pi * x); }, 16);
        for (std::size_t n = 1; n <= 16; ++n) {
            c.near_abs(row.coeff(n), m == n ? 1.0 : 0.0, 1e-10, "Gram matrix of the sine basis");
        }
    }
    return c.result("sine-coefficients");
}

inline SuiteResult suite_hdot_norm() {
    Check c;
    using std::numbers::pi;
    const SineExpansion e1({1.0});
    c.near_rel(hdot_norm(e1, 0.0), 1.0, 1e-15, "s = 0");
    c.near_rel(hdot_norm(e1, 1.0), pi, 1e-15, "s = 1");
    const SineExpansion e2({1.0, 1.0});
    c.near_rel(hdot_norm(e2, 2.0), pi * pi * std::sqrt(17.0), 1e-14, "s = 2 on [1, 1]");

    const auto bump = sine_coeffs(problem_data::smooth_bump, 512);
    const auto bump2 = sine_coeffs(problem_data::smooth_bump, 1024);
    double prev = 0.0;
    for (double s = 0.0; s <= 2.0; s += 0.25) {
        const double v = hdot_norm(bump, s);
        c.expect(v >= prev, "nondecreasing in s");
        prev = v;
        const double v2 = hdot_norm(bump2, s);
        c.expect(std::abs(v2 - v) < 0.01 * v, "doubling N changes the norm by < 1%");
    }
    return c.result("hdot-norm");
}

inline SuiteResult suite_smoothness() {
    Check c;
    const std::array<std::pair<double (*)(double), double>, 4> cases = {{
        {problem_data::smooth_bump, 2.0},
        {problem_data::tent, 1.5},
        {problem_data::sqrt_bump, 1.0},
        {problem_data::step, 0.5},
    }};
    for (const auto& [phi, p] : cases) {
        const double est = estimate_smoothness(phi, 1024);
        c.near_abs(est, p, 0.25, "smoothness index");
    }
    bool threw = false;
    try {
        (void)estimate_smoothness([](double) { return 0.0; }, 64);
    } catch (const InvalidArgument&) {
        threw = true;
    }
    c.expect(threw, "degenerate fit rejected");
    return c.result("smoothness-estimate");
}

struct Suite {
    std::string_view module;
    SuiteResult (*run)();
};

inline constexpr std::array<Suite, 17> suites = {{
    {"fraccalc", suite_gamma},
    {"fraccalc", suite_l1_weights},
    {"fraccalc", suite_caputo_l1},
    {"fraccalc", suite_frac_integral},
    {"fraccalc", suite_discrete_positivity},
    {"fraccalc", suite_discrete_inner_product},
    {"fraccalc", suite_mittag_leffler_values},
    {"fraccalc", suite_mittag_leffler_seams},
    {"fem1d", suite_fem_assembly},
    {"fem1d", suite_tridiagonal},
    {"fem1d", suite_l2_projection},
    {"fem1d", suite_ritz_projection},
    {"fem1d", suite_error_norms},
    {"spectral", suite_sine_coefficients},
    {"spectral", suite_hdot_norm},
    {"spectral", suite_smoothness},
    {"spectral", [] {
         Check c;
         const auto e = sine_coeffs(problem_data::tent, 128);
         double sum = 0.0;
         for (double v : e.coeffs()) sum += v * v;
         c.expect(sum <= 1.0 / 3.0 + 1e-8, "Bessel inequality for the tent");
         c.expect(std::abs(e.coeff(2)) < 1e-12, "even modes of a symmetric datum vanish");
         return c.result("parseval");
     }},
}};

/// Runs every suite; an exception inside a suite counts as its failure.
inline std::vector<SuiteResult> run_all() {
    std::vector<SuiteResult> out;
    for (const auto& s : suites) {
        try {
            out.push_back(s.run());
        } catch (const std::exception& e) {
            out.push_back({"(suite threw)", false, e.what()});
        }
        out.back().name = std::string(s.module) + "/" + out.back().name;
    }
    return out;
}

}  // namespace subdiff::selftest
