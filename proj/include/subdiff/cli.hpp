#pragma once

#include "subdiff/config.hpp"
#include "subdiff/harness.hpp"
#include "subdiff/problems.hpp"
#include "subdiff/selftest.hpp"
#include "subdiff/timestepper.hpp"

#include <ostream>
#include <string>

namespace subdiff {

/// Step used by solve and order when --dt is absent.
inline constexpr double default_dt = 2e-3;

/// Final frame as `x,u` (boundary included), or every k-th frame as `t,x,u`.
inline std::string render_solution_csv(const SolutionHistory& hist, std::size_t stride) {
    auto os = detail::csv_stream();
    const auto& mesh = hist.mesh();
    auto rows = [&](const FEFunction& u, const double* t) {
        for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
            if (t) os << *t << ',';
            os << mesh.node(i) << ',' << u.nodal_value(i) << '\n';
        }
    };
    if (stride == 0) {
        os << "x,u\n";
        rows(hist.final_frame(), nullptr);
        return os.str();
    }
    os << "t,x,u\n";
    const std::size_t last = hist.size() - 1;
    for (std::size_t n = 0; n <= last; ++n) {
        if (n % stride != 0 && n != last) continue;
        const double t = hist.grid().time(n);
        rows(hist.frame(n), &t);
    }
    return os.str();
}

/// CSV text the configured command produces. Selftest writes its report to
/// `log` and returns the empty string; `ok` tells whether every suite passed.
inline std::string execute(const RunConfig& cfg, std::ostream& log, bool& ok) {
    ok = true;
    if (cfg.command == Command::selftest) {
        std::size_t failed = 0;
        const auto results = selftest::run_all();
        for (const auto& r : results) {
            log << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
            if (!r.passed) ++failed;
        }
        log << results.size() - failed << "/" << results.size() << " suites passed\n";
        ok = failed == 0;
        return {};
    }

    const FracOrder alpha(cfg.alpha);
    const auto prob = get_problem(cfg.problem, alpha);
    const double h = 1.0 / static_cast<double>(cfg.nx);
    switch (cfg.command) {
        case Command::solve: {
            const double dt = cfg.dt.value_or(default_dt);
            check_step_cap(cfg.T, dt);
            const auto hist = march(prob, Mesh1D(cfg.nx), TimeGrid::covering(cfg.T, dt), alpha);
            return render_solution_csv(hist, cfg.frames);
        }
        case Command::order: {
            const double dt = cfg.dt.value_or(default_dt);
            check_step_cap(cfg.T, dt);
            return render_order_csv(aitken_order(prob, alpha, h, dt, cfg.T));
        }
        case Command::timeerr: {
            TimeErrorOptions opt;
            opt.gamma = cfg.gamma;
            opt.dt_floor = cfg.dt_floor;
            opt.dt = cfg.dt.value_or(0.0);
            opt.max_frames = cfg.max_frames == 0 ? 0 : std::max(cfg.max_frames, cfg.fit_points);
            const auto series = time_error_study(prob, alpha, h, cfg.T, cfg.ref_refine, opt);
            if (series.points.size() < cfg.fit_points) {
                throw InvalidArgument("fit_points: " + std::to_string(cfg.fit_points) +
                                      " exceeds the " + std::to_string(series.points.size()) +
                                      " frames available");
            }
            return render_time_series_csv(series, fit_power_law(series, cfg.fit_points));
        }
        default: break;
    }
    throw InvalidArgument("command: required (solve, order, timeerr or selftest)");
}

/// Runs one command; returns the process exit status. Output goes to
/// `out` unless cfg.out_path is set, in which case the file is replaced
/// atomically and only on success.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        bool ok = true;
        const auto csv = execute(cfg, out, ok);
        if (!csv.empty()) {
            if (cfg.out_path.empty() || cfg.out_path == "-") {
                out << csv;
            } else {
                write_file_atomically(cfg.out_path, csv);
            }
        }
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace subdiff
