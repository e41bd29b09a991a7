#pragma once

#include "subdiff/error.hpp"
#include "subdiff/fraccalc.hpp"
#include "subdiff/timestepper.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subdiff {

/// Identifiers accepted by get_problem.
inline constexpr std::array<std::string_view, 8> problem_names = {
    "order1",   "order2",   "order3",   "errtime1",
    "errtime2", "errtime3", "errtime4", "ml_relaxation",
};

inline bool is_registered_problem(std::string_view name) {
    return std::find(problem_names.begin(), problem_names.end(), name) != problem_names.end();
}

namespace problem_data {

inline double smooth_bump(double x) { return x * (1.0 - x); }
inline double step(double x) { return x < 0.5 ? 0.0 : 1.0; }
inline double tent(double x) { return 1.0 - std::abs(2.0 * x - 1.0); }
inline double sqrt_bump(double x) { return std::sqrt(std::max(0.0, x * (1.0 - x))); }

/// 1 + cos(2 pi x)/2 + sqrt|t - 1/2|: bounded, D_t integrable but unbounded at t = 1/2.
inline double kinked_diffusivity(double x, double t) {
    return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * x) + std::sqrt(std::abs(t - 0.5));
}
inline double kinked_diffusivity_dx(double x, double) {
    return -std::numbers::pi * std::sin(2.0 * std::numbers::pi * x);
}

inline double logistic(double, double, double u) { return u * (1.0 - u); }

/// Band on which the logistic source is treated as Lipschitz.
inline constexpr double logistic_band = 4.0;

}  // namespace problem_data

namespace detail {

inline void check_diffusivity_box(const ProblemSpec& p, std::size_t samples) {
    for (std::size_t i = 0; i <= samples; ++i) {
        for (std::size_t j = 0; j <= samples; ++j) {
            const double x = static_cast<double>(i) / static_cast<double>(samples);
            const double t = static_cast<double>(j) / static_cast<double>(samples);
            const double d = p.diffusivity(x, t);
            if (!(d >= p.d_minus && d <= p.d_plus) || !(p.d_minus > 0.0)) {
                throw InvalidArgument("problem " + p.name + ": diffusivity " + std::to_string(d) +
                                      " outside its registered bounds at (" + std::to_string(x) +
                                      ", " + std::to_string(t) + ")");
            }
        }
    }
}

inline ProblemSpec logistic_problem(std::string name, double (*phi)(double), double p) {
    using namespace problem_data;
    ProblemSpec s;
    s.name = std::move(name);
    s.diffusivity = kinked_diffusivity;
    s.diffusivity_dx = kinked_diffusivity_dx;
    s.source = logistic;
    s.initial = phi;
    s.p_nominal = p;
    // |f_u| = |1 - 2u| <= 1 + 2 * band
    s.lipschitz = 1.0 + 2.0 * logistic_band;
    s.d_minus = 0.5;
    s.d_plus = 1.5 + std::sqrt(0.5) + 1e-12;
    s.state_bound = logistic_band;
    return s;
}

}  // namespace detail

/// Benchmark problem by identifier. The order1 source and the ml_relaxation
/// exact solution depend on alpha.
inline ProblemSpec get_problem(std::string_view name, FracOrder alpha) {
    using namespace problem_data;
    const double a = alpha.value();
    ProblemSpec s;
    if (name == "order1") {
        // u = (1 + t^2) x (1 - x), D = 1 + x + t
        const double g = gamma_fn(3.0 - a);
        s.name = "order1";
        s.diffusivity = [](double x, double t) { return 1.0 + x + t; };
        s.diffusivity_dx = [](double, double) { return 1.0; };
        s.source = [a, g](double x, double t, double u) {
            const double t2 = 1.0 + t * t;
            const double memory = (t > 0.0) ? 2.0 * std::pow(t, 2.0 - a) / (t2 * g) : 0.0;
            return t2 * (1.0 + 2.0 * t + 4.0 * x) + memory * u;
        };
        s.initial = smooth_bump;
        s.exact = [](double x, double t) { return (1.0 + t * t) * x * (1.0 - x); };
        s.manufactured = ManufacturedSolution{
            {1.0, 0.0, 1.0},
            smooth_bump,
            [](double x) { return 1.0 - 2.0 * x; },
            [](double) { return -2.0; },
        };
        s.p_nominal = 2.0;
        // t^(2-a) / (1 + t^2) <= 1 for all t >= 0
        s.lipschitz = 2.0 / g;
        s.d_minus = 1.0;
        s.d_plus = 3.0;
    } else if (name == "order2") {
        s = detail::logistic_problem("order2", smooth_bump, 2.0);
    } else if (name == "order3") {
        s = detail::logistic_problem("order3", step, 0.5);
    } else if (name == "errtime1") {
        s = detail::logistic_problem("errtime1", smooth_bump, 2.0);
    } else if (name == "errtime2") {
        s = detail::logistic_problem("errtime2", tent, 1.5);
    } else if (name == "errtime3") {
        s = detail::logistic_problem("errtime3", sqrt_bump, 1.0);
    } else if (name == "errtime4") {
        s = detail::logistic_problem("errtime4", step, 0.5);
    } else if (name == "ml_relaxation") {
        using std::numbers::pi;
        using std::numbers::sqrt2;
        s.name = "ml_relaxation";
        s.diffusivity = [](double, double) { return 1.0; };
        s.diffusivity_dx = [](double, double) { return 0.0; };
        s.source = [](double, double, double) { return 0.0; };
        s.initial = [](double x) { return sqrt2 * std::sin(pi * x); };
        s.exact = [a](double x, double t) {
            const double amp = (t > 0.0) ? mittag_leffler(a, -pi * pi * std::pow(t, a)) : 1.0;
            return amp * sqrt2 * std::sin(pi * x);
        };
        s.p_nominal = 2.0;
        s.lipschitz = 0.0;
        s.d_minus = 1.0;
        s.d_plus = 1.0;
    } else {
        throw UnknownProblem("unknown problem '" + std::string(name) + "'");
    }
    detail::check_diffusivity_box(s, 20);
    return s;
}

/// Max over the sample points of |d^a u - (D u_x)_x - f(x, t, u)| for a
/// manufactured exact solution, using analytic derivatives throughout.
inline double verify_manufactured(const ProblemSpec& prob, FracOrder alpha,
                                  std::span<const std::pair<double, double>> points) {
    if (!prob.manufactured || !prob.diffusivity_dx) {
        throw InvalidArgument("verify_manufactured: problem " + prob.name +
                              " has no manufactured solution");
    }
    const auto& m = *prob.manufactured;
    double worst = 0.0;
    for (const auto& [x, t] : points) {
        double p = 0.0;
        double dp = 0.0;
        double tk = 1.0;
        for (std::size_t k = 0; k < m.time_poly.size(); ++k) {
            p += m.time_poly[k] * tk;
            if (k > 0) dp += m.time_poly[k] * caputo_monomial(alpha, static_cast<double>(k), t);
            tk *= t;
        }
        const double u = p * m.space(x);
        const double caputo = dp * m.space(x);
        const double flux_dx = p * (prob.diffusivity_dx(x, t) * m.space_dx(x) +
                                    prob.diffusivity(x, t) * m.space_dxx(x));
        const double r = caputo - flux_dx - prob.source(x, t, u);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace subdiff
