#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace subdiff {

namespace detail {

// Lanczos approximation in rational form, g = 6.024680040776729583740234375
// with 13 terms (the "13m53" set tabulated by Boost.Math, fitted for 53-bit
// doubles). Gamma(z) = S(z) * (z+g-1/2)^(z-1/2) * exp(-(z+g-1/2)) where
// S(z) = N(z)/D(z) already contains the sqrt(2 pi) factor and
// D(z) = z (z+1) ... (z+11). Relative error < 1e-15 on (0, 172) before
// rounding of the power and exponential.
inline constexpr double lanczos_g = 6.024680040776729583740234375;
inline constexpr std::array<double, 13> lanczos_num = {
    23531376880.41075968857200767445163675473, 42919803642.64909876895789904700198885093,
    35711959237.35566804944018545154716670596, 17921034426.03720969991975575445893111267,
    6039542586.35202800506429164430729792107,  1439720407.311721673663223072794912393972,
    248874557.8620541565114603864132294232163, 31426415.58540019438061423162831820536287,
    2876370.628935372441225409051620849613599, 186056.2653952234950402949897160456992822,
    8071.672002365816210638002902272250613822, 210.8242777515793458725097339207133627117,
    2.506628274631000270164908177133837338626,
};
inline constexpr std::array<double, 13> lanczos_den = {
    0.0,       39916800.0, 120543840.0, 150917976.0, 105258076.0, 45995730.0, 13339535.0,
    2637558.0, 357423.0,   32670.0,     1925.0,      66.0,        1.0,
};

inline double lanczos_sum(double z) {
    double n = 0.0;
    double d = 0.0;
    for (std::size_t i = lanczos_num.size(); i-- > 0;) {
        n = n * z + lanczos_num[i];
        d = d * z + lanczos_den[i];
    }
    return n / d;
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

}  // namespace detail

/// Gamma function for real arguments. Poles return NaN.
inline double gamma_fn(double z) {
    using std::numbers::pi;
    if (std::isnan(z) || detail::is_nonpositive_integer(z)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (z < 0.5) {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return pi / (std::sin(pi * z) * gamma_fn(1.0 - z));
    }
    const double zgh = z + detail::lanczos_g - 0.5;
    // Split the power so that zgh^(z-1/2) does not overflow before e^-zgh scales it.
    const double half_pow = std::pow(zgh, 0.5 * (z - 0.5));
    return detail::lanczos_sum(z) * half_pow * std::exp(-zgh) * half_pow;
}

/// log|Gamma(z)|; +inf at poles.
inline double log_gamma_fn(double z) {
    using std::numbers::pi;
    if (detail::is_nonpositive_integer(z)) {
        return std::numeric_limits<double>::infinity();
    }
    if (z < 0.5) {
        return std::log(pi / std::abs(std::sin(pi * z))) - log_gamma_fn(1.0 - z);
    }
    const double zgh = z + detail::lanczos_g - 0.5;
    return (z - 0.5) * std::log(zgh) - zgh + std::log(detail::lanczos_sum(z));
}

/// Sign of Gamma(z) (0 at poles).
inline double gamma_sign(double z) {
    if (detail::is_nonpositive_integer(z)) return 0.0;
    if (z > 0.0) return 1.0;
    // Gamma alternates sign between consecutive negative integers.
    return (static_cast<long long>(std::floor(z)) % 2 == 0) ? 1.0 : -1.0;
}

/// 1/Gamma(z), an entire function: exactly zero at the poles of Gamma.
inline double rgamma_fn(double z) {
    if (detail::is_nonpositive_integer(z)) return 0.0;
    if (z > 170.0) return std::exp(-log_gamma_fn(z));
    return 1.0 / gamma_fn(z);
}

}  // namespace subdiff
