#pragma once

#include "subdiff/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace subdiff {

/// Coefficients c_n = (v, phi_n), phi_n(x) = sqrt(2) sin(n pi x), n = 1..N.
class SineExpansion {
public:
    explicit SineExpansion(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    std::size_t size() const noexcept { return coeffs_.size(); }
    /// c_n for n = 1..N (one-based, matching the eigenfunction index)
    double coeff(std::size_t n) const { return coeffs_.at(n - 1); }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

namespace detail {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> gauss8_nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> gauss8_weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

struct QuadratureRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Composite 8-point Gauss on `panels` equal panels of [0, 1].
inline QuadratureRule composite_gauss8(std::size_t panels) {
    QuadratureRule r;
    r.x.reserve(8 * panels);
    r.w.reserve(8 * panels);
    const double width = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * width;
        for (std::size_t q = 0; q < 8; ++q) {
            r.x.push_back(mid + 0.5 * width * gauss8_nodes[q]);
            r.w.push_back(0.5 * width * gauss8_weights[q]);
        }
    }
    return r;
}

/// Panel count for N modes: two panels per half-wavelength of phi_N (16
/// points), always even so x = 1/2 is a panel boundary.
inline std::size_t sine_panels(std::size_t n_modes) {
    return 2 * std::max<std::size_t>(n_modes, 32);
}

}  // namespace detail

/// Sine coefficients by composite Gauss quadrature.
template <class Fn>
    requires std::invocable<const Fn&, double>
SineExpansion sine_coeffs(const Fn& v, std::size_t n_modes) {
    using std::numbers::pi;
    if (n_modes == 0) throw InvalidArgument("sine_coeffs: need at least one mode");
    const auto rule = detail::composite_gauss8(detail::sine_panels(n_modes));
    std::vector<double> wv(rule.x.size());
    for (std::size_t q = 0; q < wv.size(); ++q) {
        const double val = v(rule.x[q]);
        if (!std::isfinite(val)) throw InvalidArgument("sine_coeffs: non-finite sample");
        wv[q] = rule.w[q] * val;
    }
    std::vector<double> c(n_modes);
    for (std::size_t n = 1; n <= n_modes; ++n) {
        const double k = static_cast<double>(n) * pi;
        double s = 0.0;
        for (std::size_t q = 0; q < wv.size(); ++q) s += wv[q] * std::sin(k * rule.x[q]);
        c[n - 1] = std::numbers::sqrt2 * s;
    }
    return SineExpansion(std::move(c));
}

/// Truncated dot-H^s norm: sqrt(sum_n (n^2 pi^2)^s c_n^2).
inline double hdot_norm(const SineExpansion& e, double s) {
    using std::numbers::pi;
    double acc = 0.0;
    for (std::size_t n = 1; n <= e.size(); ++n) {
        const double lambda = static_cast<double>(n * n) * pi * pi;
        const double c = e.coeff(n);
        acc += std::pow(lambda, s) * c * c;
    }
    return std::sqrt(acc);
}

/// Highest index reported by estimate_smoothness.
inline constexpr double smoothness_ceiling = 2.0;

/// Coefficients below this magnitude are treated as exact zeros.
inline constexpr double smoothness_zero_cutoff = 1e-14;

/// Estimates p such that the data lies in dot-H^s for all s < p, from the
/// decay |c_n| ~ n^(-p-1/2) fitted by least squares on log-log axes over
/// n in [N/4, N]. The result is capped at smoothness_ceiling.
template <class Fn>
    requires std::invocable<const Fn&, double>
double estimate_smoothness(const Fn& v, std::size_t n_modes = 1024) {
    if (n_modes < 64) throw InvalidArgument("estimate_smoothness: need at least 64 modes");
    const auto e = sine_coeffs(v, n_modes);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t n = n_modes / 4; n <= n_modes; ++n) {
        const double c = std::abs(e.coeff(n));
        if (c < smoothness_zero_cutoff) continue;
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(c);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) {
        throw InvalidArgument("estimate_smoothness: degenerate fit (coefficients below cutoff)");
    }
    const double cnt = static_cast<double>(count);
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return std::min(-slope - 0.5, smoothness_ceiling);
}

}  // namespace subdiff
