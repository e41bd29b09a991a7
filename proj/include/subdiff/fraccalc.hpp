#pragma once

#include "subdiff/error.hpp"
#include "subdiff/gamma.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace subdiff {

/// Order of the Caputo derivative, strictly inside (0, 1).
class FracOrder {
public:
    explicit FracOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw InvalidArgument("fractional order alpha must lie in (0,1), got " +
                                  std::to_string(alpha));
        }
    }

    double value() const noexcept { return alpha_; }

    friend bool operator==(const FracOrder&, const FracOrder&) = default;

private:
    double alpha_;
};

/// Leading weights b_j = (j+1)^(1-alpha) - j^(1-alpha) of the L1 scheme.
class L1Weights {
public:
    L1Weights(FracOrder alpha, std::vector<double> b) : alpha_(alpha), b_(std::move(b)) {}

    FracOrder alpha() const noexcept { return alpha_; }
    std::size_t size() const noexcept { return b_.size(); }
    double operator[](std::size_t j) const { return b_[j]; }
    std::span<const double> values() const noexcept { return b_; }

    /// tau^(-alpha) / Gamma(2 - alpha)
    double scale(double tau) const {
        const double a = alpha_.value();
        return std::pow(tau, -a) / gamma_fn(2.0 - a);
    }

private:
    FracOrder alpha_;
    std::vector<double> b_;
};

/// The first n L1 weights. For large j the difference is formed as
/// j^(1-a) * expm1((1-a) log1p(1/j)) to avoid cancellation.
inline L1Weights l1_weights(FracOrder alpha, std::size_t n) {
    if (n == 0) throw InvalidArgument("l1_weights: need at least one weight");
    const double e = 1.0 - alpha.value();
    std::vector<double> b(n);
    b[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
        const double jd = static_cast<double>(j);
        b[j] = std::pow(jd, e) * std::expm1(e * std::log1p(1.0 / jd));
    }
    return L1Weights(alpha, std::move(b));
}

namespace detail {

inline void require_same_dimension(std::span<const std::vector<double>> samples,
                                   const char* who) {
    for (const auto& s : samples) {
        if (s.size() != samples.front().size()) {
            throw InvalidArgument(std::string(who) + ": sample dimension mismatch");
        }
    }
}

}  // namespace detail

/// L1 approximation of the Caputo derivative at t_n from samples y^0..y^n:
///   tau^-a / Gamma(2-a) * sum_{k<n} b_{n-1-k} (y^{k+1} - y^k).
inline std::vector<double> caputo_l1_apply(const L1Weights& w, double tau,
                                           std::span<const std::vector<double>> samples) {
    if (samples.size() < 2) throw InvalidArgument("caputo_l1_apply: need at least two samples");
    if (!(tau > 0.0)) throw InvalidArgument("caputo_l1_apply: tau must be positive");
    detail::require_same_dimension(samples, "caputo_l1_apply");
    const std::size_t n = samples.size() - 1;
    if (w.size() < n) throw InvalidArgument("caputo_l1_apply: not enough weights");

    std::vector<double> out(samples.front().size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double bk = w[n - 1 - k];
        const auto& lo = samples[k];
        const auto& hi = samples[k + 1];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += bk * (hi[i] - lo[i]);
    }
    const double s = w.scale(tau);
    for (double& v : out) v *= s;
    return out;
}

/// Riemann-Liouville integral I^a y(t_n) by a piecewise-constant product rule:
/// on [t_k, t_{k+1}] the integrand is frozen at y^{k+1} and the kernel
/// (t_n - s)^(a-1) / Gamma(a) is integrated exactly. Constants are reproduced
/// exactly, and the induced quadratic form is positive definite.
inline std::vector<double> frac_integral_apply(double alpha, double tau,
                                               std::span<const std::vector<double>> samples) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("frac_integral_apply: alpha must lie in (0,1]");
    }
    if (!(tau > 0.0)) throw InvalidArgument("frac_integral_apply: tau must be positive");
    if (samples.empty()) throw InvalidArgument("frac_integral_apply: empty sample sequence");
    detail::require_same_dimension(samples, "frac_integral_apply");

    const std::size_t n = samples.size() - 1;
    const double c = std::pow(tau, alpha) * rgamma_fn(alpha + 1.0);
    std::vector<double> out(samples.front().size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double m = static_cast<double>(n - k);
        const double moment = c * (std::pow(m, alpha) - std::pow(m - 1.0, alpha));
        const auto& y = samples[k + 1];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += moment * y[i];
    }
    return out;
}

/// Caputo derivative of t^gamma: Gamma(g+1)/Gamma(g+1-a) t^(g-a); zero for g = 0.
inline double caputo_monomial(FracOrder alpha, double gamma, double t) {
    if (!(gamma >= 0.0)) throw InvalidArgument("caputo_monomial: gamma must be >= 0");
    if (!(t > 0.0)) throw InvalidArgument("caputo_monomial: t must be positive");
    if (gamma == 0.0) return 0.0;
    const double a = alpha.value();
    return std::exp(log_gamma_fn(gamma + 1.0) - log_gamma_fn(gamma + 1.0 - a)) *
           std::pow(t, gamma - a);
}

// ---------------------------------------------------------------------------
// Mittag-Leffler function E_{a,b}(z) for real z.
// ---------------------------------------------------------------------------

namespace ml {

inline constexpr double target_rel_tol = 1e-10;

struct SeriesResult {
    double value = 0.0;
    /// max |term| / |sum|; the relative error is about this times machine epsilon.
    double cancellation = 1.0;
    std::size_t terms = 0;
};

/// Taylor series sum_k z^k / Gamma(a k + b) with Kahan summation.
inline SeriesResult series(double alpha, double beta, double z) {
    SeriesResult r;
    if (z == 0.0) {
        r.value = rgamma_fn(beta);
        r.terms = 1;
        return r;
    }
    const double log_abs_z = std::log(std::abs(z));
    // Terms decrease monotonically once a k + b exceeds |z|^(1/a) (Stirling).
    const double peak_arg = std::pow(std::abs(z), 1.0 / alpha);
    constexpr std::size_t max_terms = 400000;

    double sum = 0.0;
    double comp = 0.0;
    double max_term = 0.0;
    int small_run = 0;
    for (std::size_t k = 0; k < max_terms; ++k) {
        const double kd = static_cast<double>(k);
        const double arg = alpha * kd + beta;
        double term = 0.0;
        if (!detail::is_nonpositive_integer(arg)) {
            const double log_mag = kd * log_abs_z - log_gamma_fn(arg);
            if (log_mag > 709.0) {
                throw AccuracyError("mittag_leffler: series term overflows double range");
            }
            if (arg < 170.0 && std::abs(kd * log_abs_z) < 700.0) {
                term = std::pow(z, kd) * rgamma_fn(arg);
            } else {
                const double sign = ((z < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0) * gamma_sign(arg);
                term = sign * std::exp(log_mag);
            }
        }
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        max_term = std::max(max_term, std::abs(term));
        r.terms = k + 1;

        if (arg > peak_arg + 1.0 && std::abs(term) <= 1e-17 * std::abs(sum)) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
        if (k + 1 == max_terms) {
            throw AccuracyError("mittag_leffler: series did not converge");
        }
    }
    r.value = sum;
    r.cancellation = (sum != 0.0) ? max_term / std::abs(sum)
                                  : std::numeric_limits<double>::infinity();
    return r;
}

struct AsymptoticResult {
    double value = 0.0;
    /// magnitude of the first omitted term
    double error_bound = 0.0;
    std::size_t terms = 0;
};

/// Asymptotic expansion for z -> -inf: -sum_{k>=1} z^-k / Gamma(b - a k),
/// truncated just before the smallest term.
inline AsymptoticResult asymptotic(double alpha, double beta, double z,
                                   std::size_t max_terms = 200) {
    if (!(z < 0.0)) throw InvalidArgument("mittag_leffler asymptotic: requires z < 0");
    AsymptoticResult r;
    double prev = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double comp = 0.0;
    const double inv_z = 1.0 / z;
    double zpow = 1.0;
    for (std::size_t k = 1; k <= max_terms; ++k) {
        zpow *= inv_z;
        const double rg = rgamma_fn(beta - alpha * static_cast<double>(k));
        const double term = -zpow * rg;
        const double mag = std::abs(term);
        // Zero terms (poles of Gamma) carry no information about divergence.
        if (mag != 0.0 && mag > prev) {
            r.error_bound = mag;
            break;
        }
        if (mag != 0.0) prev = mag;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        r.terms = k;
        r.error_bound = mag;
        if (mag != 0.0 && mag < 1e-18 * std::abs(sum)) break;
    }
    r.value = sum;
    return r;
}

/// Integral representation for z < 0, 0 < a < 1, b < 1 + a:
///   E_{a,b}(z) = int_0^inf K(chi) dchi,
///   K = chi^((1-b)/a) exp(-chi^(1/a)) (chi sin(pi(1-b)) - z sin(pi(1-b+a)))
///       / (a pi (chi^2 - 2 chi z cos(a pi) + z^2)).
inline double integral(double alpha, double beta, double z, double* error_estimate = nullptr) {
    using std::numbers::pi;
    if (!(z < 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(beta < 1.0 + alpha)) {
        throw InvalidArgument("mittag_leffler integral: needs z<0, 0<alpha<1, beta<1+alpha");
    }
    const double power = (1.0 - beta) / alpha;
    const double s1 = std::sin(pi * (1.0 - beta));
    const double s2 = std::sin(pi * (1.0 - beta + alpha));
    const double c = std::cos(alpha * pi);
    const double pref = 1.0 / (alpha * pi);
    auto kernel = [=](double chi) {
        if (chi <= 0.0) return 0.0;
        const double decay = std::exp(-std::pow(chi, 1.0 / alpha));
        if (decay == 0.0) return 0.0;
        const double num = chi * s1 - z * s2;
        const double den = chi * chi - 2.0 * chi * z * c + z * z;
        const double p = (power == 0.0) ? 1.0 : std::pow(chi, power);
        return pref * p * decay * num / den;
    };

    std::vector<double> breaks{0.0};
    if (c < 0.0) breaks.push_back(-z * -c);  // denominator minimum
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    constexpr double tol = 1e-14;
    boost::math::quadrature::tanh_sinh<double> finite;
    boost::math::quadrature::exp_sinh<double> tail;
    double total = 0.0;
    double err_total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double err = 0.0;
        // Two-argument form: the one-argument wrapper in Boost 1.74 can place
        // abscissae exactly on an endpoint.
        auto kernel2 = [&](double chi, double) { return kernel(chi); };
        total += finite.integrate(kernel2, breaks[i], breaks[i + 1], tol, &err);
        err_total += err;
    }
    {
        double err = 0.0;
        total += tail.integrate(kernel, breaks.back(), std::numeric_limits<double>::infinity(),
                                tol, &err);
        err_total += err;
    }
    if (error_estimate) *error_estimate = err_total;
    return total;
}

}  // namespace ml

/// Two-parameter Mittag-Leffler function E_{a,b}(z) = sum z^k / Gamma(a k + b)
/// for 0 < a <= 1 and real z, to relative accuracy 1e-10.
///
/// Regimes: a = b = 1 is exp; z >= 0 and |z| <= 1 use the Taylor series
/// (positive terms or bounded cancellation); z < -1 uses the integral
/// representation when b < 1 + a. Anything else falls back to the series and
/// throws AccuracyError when cancellation would exceed the tolerance.
inline double mittag_leffler(double alpha, double beta, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("mittag_leffler: alpha must lie in (0,1]");
    }
    if (!std::isfinite(beta) || !std::isfinite(z)) {
        throw InvalidArgument("mittag_leffler: non-finite argument");
    }
    if (alpha == 1.0 && beta == 1.0) return std::exp(z);

    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (z < -1.0 && alpha < 1.0 && beta < 1.0 + alpha) {
        double err = 0.0;
        const double v = ml::integral(alpha, beta, z, &err);
        if (!(err <= ml::target_rel_tol * std::abs(v))) {
            throw AccuracyError("mittag_leffler: quadrature error estimate above tolerance");
        }
        return v;
    }
    const auto s = ml::series(alpha, beta, z);
    if (!(s.cancellation * eps * 10.0 <= ml::target_rel_tol)) {
        throw AccuracyError("mittag_leffler: series cancellation exceeds tolerance at z=" +
                            std::to_string(z));
    }
    return s.value;
}

/// E_a(z) = E_{a,1}(z)
inline double mittag_leffler(double alpha, double z) { return mittag_leffler(alpha, 1.0, z); }

}  // namespace subdiff
