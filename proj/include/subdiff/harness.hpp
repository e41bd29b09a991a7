#pragma once

#include "subdiff/error.hpp"
#include "subdiff/fem1d.hpp"
#include "subdiff/fraccalc.hpp"
#include "subdiff/timestepper.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace subdiff {

/// Worker threads allowed by SUBDIFF_THREADS (unset or 0: hardware concurrency).
inline unsigned worker_count() {
    unsigned n = 0;
    if (const char* env = std::getenv("SUBDIFF_THREADS")) {
        n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Step rule max(gamma * h^(2/alpha), dt_floor). alpha is taken as a plain
/// number so the alpha = 1 limit can be evaluated.
inline double dt_rule(double h, double alpha, double gamma, double dt_floor) {
    if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("dt_rule: h must lie in (0,1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("dt_rule: alpha must lie in (0,1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("dt_rule: gamma must lie in (0,1]");
    if (!(dt_floor > 0.0)) throw InvalidArgument("dt_rule: dt_floor must be positive");
    return std::max(gamma * std::pow(h, 2.0 / alpha), dt_floor);
}

/// Throws StepCapError when reaching `horizon` with step `dt` needs too many steps.
inline void check_step_cap(double horizon, double dt) {
    const double steps = std::ceil(horizon / dt * (1.0 - 1e-12));
    if (steps > static_cast<double>(max_time_steps)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " needs " << steps << " steps to reach T = " << horizon
            << ", above the cap of " << max_time_steps
            << "; use a larger alpha or a coarser mesh, or shorten the horizon";
        throw StepCapError(msg.str());
    }
}

/// Element count for a mesh size h; h must be the reciprocal of an integer.
inline std::size_t elements_for(double h) {
    if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("mesh size h must lie in (0,1)");
    const double n = std::round(1.0 / h);
    if (std::abs(n * h - 1.0) > 1e-9) {
        throw InvalidArgument("mesh size h = " + std::to_string(h) +
                              " is not the reciprocal of an integer");
    }
    return static_cast<std::size_t>(n);
}

// ---------------------------------------------------------------------------
// Aitken order estimate
// ---------------------------------------------------------------------------

struct OrderStudyResult {
    std::string problem;
    double alpha = 0.0;
    double h = 0.0;
    double dt = 0.0;
    double T = 0.0;
    double norm_coarse_mid = 0.0;  ///< ||u_{h/2} - u_h||
    double norm_mid_fine = 0.0;    ///< ||u_{h/4} - u_{h/2}||
    double p_estimate = 0.0;
    /// false when the differences sit at round-off and the ratio means nothing
    bool reliable = true;
};

/// log2(coarse / fine)
inline double aitken_estimate(double norm_coarse_mid, double norm_mid_fine) {
    return std::log2(norm_coarse_mid / norm_mid_fine);
}

/// Differences below this are treated as round-off.
inline constexpr double aitken_noise_floor = 1e-12;

/// Solves on h, h/2, h/4 with one shared time grid and estimates the spatial
/// order from the L2 differences at t = T.
inline OrderStudyResult aitken_order(const ProblemSpec& prob, FracOrder alpha, double h, double dt,
                                     double horizon, unsigned workers = worker_count()) {
    const std::size_t n = elements_for(h);
    const auto grid = TimeGrid::covering(horizon, dt);
    const std::array<Mesh1D, 3> meshes{Mesh1D(n), Mesh1D(2 * n), Mesh1D(4 * n)};

    auto solve = [&](std::size_t i) { return march(prob, meshes[i], grid, alpha).final_frame(); };
    std::vector<FEFunction> finals;
    if (workers > 1) {
        std::array<std::future<FEFunction>, 3> jobs;
        for (std::size_t i = 0; i < 3; ++i) jobs[i] = std::async(std::launch::async, solve, i);
        for (auto& j : jobs) finals.push_back(j.get());
    } else {
        for (std::size_t i = 0; i < 3; ++i) finals.push_back(solve(i));
    }

    OrderStudyResult r;
    r.problem = prob.name;
    r.alpha = alpha.value();
    r.h = h;
    r.dt = grid.tau();
    r.T = grid.horizon();
    r.norm_coarse_mid = fe_error_norms(finals[0], finals[1]).l2;
    r.norm_mid_fine = fe_error_norms(finals[1], finals[2]).l2;
    r.p_estimate = aitken_estimate(r.norm_coarse_mid, r.norm_mid_fine);
    r.reliable = r.norm_coarse_mid > aitken_noise_floor && r.norm_mid_fine > aitken_noise_floor;
    return r;
}

// ---------------------------------------------------------------------------
// Error versus time
// ---------------------------------------------------------------------------

struct TimeErrorPoint {
    double t = 0.0;
    double err = 0.0;
    double scaled = 0.0;  ///< t^(alpha (2 - p) / 2) * err
};

struct TimeErrorSeries {
    std::string problem;
    double alpha = 0.0;
    double p_nominal = 0.0;
    double dt = 0.0;
    std::vector<TimeErrorPoint> points;
};

struct TimeErrorOptions {
    double gamma = 0.1;
    double dt_floor = 1e-7;
    /// Overrides dt_rule when positive.
    double dt = 0.0;
    /// Number of steps actually marched (0: all steps up to T). Frames are
    /// causal, so the leading part of the series does not depend on this.
    std::size_t max_frames = 0;
};

/// Error of the mesh-h solution against a reference on h / ref_refine with
/// the same time grid, at every time level t_1, t_2, ...
inline TimeErrorSeries time_error_study(const ProblemSpec& prob, FracOrder alpha, double h,
                                        double horizon, std::size_t ref_refine,
                                        const TimeErrorOptions& opt = {},
                                        unsigned workers = worker_count()) {
    if (ref_refine != 2 && ref_refine != 4 && ref_refine != 8) {
        throw InvalidArgument("time_error_study: ref_refine must be 2, 4 or 8");
    }
    const std::size_t n = elements_for(h);
    const double dt = opt.dt > 0.0 ? opt.dt : dt_rule(h, alpha.value(), opt.gamma, opt.dt_floor);
    // Same tau as TimeGrid::covering(horizon, dt), without materializing
    // steps beyond max_frames.
    const double ratio = horizon / dt;
    const double total = std::max(1.0, std::ceil(ratio * (1.0 - 1e-12)));
    const double tau = horizon / total;
    double steps = total;
    if (opt.max_frames > 0) steps = std::min(total, static_cast<double>(opt.max_frames));
    check_step_cap(tau * steps, tau);
    const TimeGrid grid(tau, static_cast<std::size_t>(steps));

    const Mesh1D coarse(n);
    const Mesh1D fine(n * ref_refine);
    std::vector<SolutionHistory> runs;
    if (workers > 1) {
        auto fc = std::async(std::launch::async, [&] { return march(prob, coarse, grid, alpha); });
        auto ff = std::async(std::launch::async, [&] { return march(prob, fine, grid, alpha); });
        runs.push_back(fc.get());
        runs.push_back(ff.get());
    } else {
        runs.push_back(march(prob, coarse, grid, alpha));
        runs.push_back(march(prob, fine, grid, alpha));
    }

    TimeErrorSeries s;
    s.problem = prob.name;
    s.alpha = alpha.value();
    s.p_nominal = prob.p_nominal;
    s.dt = grid.tau();
    const double expo = alpha.value() * (2.0 - prob.p_nominal) / 2.0;
    s.points.reserve(grid.n_steps());
    for (std::size_t k = 1; k <= grid.n_steps(); ++k) {
        const double t = grid.time(k);
        const double err = fe_error_norms(runs[0].frame(k), runs[1].frame(k)).l2;
        s.points.push_back({t, err, std::pow(t, expo) * err});
    }
    return s;
}

struct PowerLawFit {
    double a = 0.0;
    double s = 0.0;
    std::size_t n_points = 0;
    double residual_rms = 0.0;  ///< RMS of the log-space residuals
};

/// Least-squares fit of y = a t^(-s) on log-log axes over the first n points.
inline PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> y,
                                 std::size_t n_points) {
    if (t.size() != y.size()) throw InvalidArgument("fit_power_law: size mismatch");
    if (n_points < 2 || n_points > t.size()) {
        throw InvalidArgument("fit_power_law: window of " + std::to_string(n_points) +
                              " points does not fit a series of " + std::to_string(t.size()));
    }
    std::vector<double> lx(n_points), ly(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        if (!(y[i] > 0.0) || !(t[i] > 0.0)) {
            throw InvalidArgument("fit_power_law: nonpositive value at point " + std::to_string(i) +
                                  "; shrink the fit window");
        }
        lx[i] = std::log(t[i]);
        ly[i] = std::log(y[i]);
    }
    const double cnt = static_cast<double>(n_points);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= cnt;
    my /= cnt;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_power_law: all abscissae coincide");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        rss += r * r;
    }
    return {std::exp(intercept), -slope, n_points, std::sqrt(rss / cnt)};
}

/// Fit of the raw error column.
inline PowerLawFit fit_power_law(const TimeErrorSeries& series, std::size_t n_points) {
    std::vector<double> t, e;
    for (const auto& p : series.points) {
        t.push_back(p.t);
        e.push_back(p.err);
    }
    return fit_power_law(t, e, n_points);
}

/// Fit of the scaled column; its exponent is zero when the error follows
/// t^(-alpha (2 - p) / 2) exactly.
inline PowerLawFit fit_scaled_power_law(const TimeErrorSeries& series, std::size_t n_points) {
    std::vector<double> t, e;
    for (const auto& p : series.points) {
        t.push_back(p.t);
        e.push_back(p.scaled);
    }
    return fit_power_law(t, e, n_points);
}

// ---------------------------------------------------------------------------
// CSV reports
// ---------------------------------------------------------------------------

inline constexpr const char* order_csv_header = "problem,alpha,h,dt,T,norm_h_h2,norm_h2_h4,p_estimate";
inline constexpr const char* time_csv_header = "t,error,scaled_error";

namespace detail {

inline std::ostringstream csv_stream() {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12);
    return os;
}

}  // namespace detail

inline std::string render_order_csv(const OrderStudyResult& r) {
    auto os = detail::csv_stream();
    os << order_csv_header << '\n'
       << r.problem << ',' << r.alpha << ',' << r.h << ',' << r.dt << ',' << r.T << ','
       << r.norm_coarse_mid << ',' << r.norm_mid_fine << ',' << r.p_estimate << '\n';
    return os.str();
}

inline std::string render_time_series_csv(const TimeErrorSeries& s, const PowerLawFit& fit) {
    if (s.points.empty()) throw InvalidArgument("emit_report: empty time series");
    auto os = detail::csv_stream();
    os << time_csv_header << '\n';
    for (const auto& p : s.points) os << p.t << ',' << p.err << ',' << p.scaled << '\n';
    os << "# fit a=" << fit.a << " s=" << fit.s << " n=" << fit.n_points
       << " rms=" << fit.residual_rms << '\n';
    return os.str();
}

/// Writes `content` to `path` through a temporary file renamed on success,
/// so a failed run never leaves a partial file behind.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + ": " + std::strerror(errno));
        }
        out << content;
        out.flush();
        if (!out) {
            const std::string why = std::strerror(errno);
            out.close();
            std::filesystem::remove(tmp);
            throw Error("write to " + tmp.string() + " failed: " + why);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move report into " + path.string() + ": " + ec.message());
    }
}

inline void emit_report(const OrderStudyResult& r, const std::filesystem::path& path) {
    write_file_atomically(path, render_order_csv(r));
}

inline void emit_report(const TimeErrorSeries& s, const PowerLawFit& fit,
                        const std::filesystem::path& path) {
    write_file_atomically(path, render_time_series_csv(s, fit));
}

}  // namespace subdiff
