#pragma once

#include "subdiff/error.hpp"
#include "subdiff/problems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace subdiff {

enum class Command { none, solve, order, timeerr, selftest };

inline constexpr std::array<std::string_view, 4> command_names = {"solve", "order", "timeerr",
                                                                  "selftest"};

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::solve: return "solve";
        case Command::order: return "order";
        case Command::timeerr: return "timeerr";
        case Command::selftest: return "selftest";
        case Command::none: break;
    }
    return "";
}

inline Command command_from_string(std::string_view s) {
    if (s == "solve") return Command::solve;
    if (s == "order") return Command::order;
    if (s == "timeerr") return Command::timeerr;
    if (s == "selftest") return Command::selftest;
    throw InvalidArgument("command: unknown command '" + std::string(s) +
                          "' (expected solve, order, timeerr or selftest)");
}

/// Everything one CLI invocation needs.
struct RunConfig {
    Command command = Command::none;
    std::string problem = "order1";
    double alpha = 0.75;
    std::size_t nx = 100;
    std::optional<double> dt;
    double gamma = 0.1;
    double T = 1.0;
    std::size_t ref_refine = 4;
    std::string out_path;  ///< empty: standard output
    std::size_t fit_points = 100;
    std::size_t frames = 0;        ///< solve: dump every k-th frame (0: final frame only)
    std::size_t max_frames = 100;  ///< timeerr: steps marched (0: all up to T)
    double dt_floor = 1e-7;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Raised for --help; carries the usage text.
class HelpRequested : public Error {
public:
    using Error::Error;
};

/// Throws InvalidArgument naming the first field out of range.
inline void validate(const RunConfig& c) {
    if (c.command == Command::none) {
        throw InvalidArgument("command: required (solve, order, timeerr or selftest)");
    }
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
        throw InvalidArgument("alpha: must lie in the open interval (0,1), got " +
                              std::to_string(c.alpha));
    }
    if (c.nx < 2) throw InvalidArgument("nx: must be >= 2");
    if (!(c.T > 0.0)) throw InvalidArgument("T: must be positive");
    if (c.fit_points < 2) throw InvalidArgument("fit_points: must be >= 2");
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw InvalidArgument("gamma: must lie in (0,1]");
    if (c.ref_refine != 2 && c.ref_refine != 4 && c.ref_refine != 8) {
        throw InvalidArgument("ref_refine: must be 2, 4 or 8");
    }
    if (c.dt && !(*c.dt > 0.0)) throw InvalidArgument("dt: must be positive");
    if (!(c.dt_floor > 0.0)) throw InvalidArgument("dt_floor: must be positive");
    if (!is_registered_problem(c.problem)) {
        throw InvalidArgument("problem: unknown identifier '" + c.problem + "'");
    }
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    is.imbue(std::locale::classic());
    T v{};
    is >> v;
    if (!is || !(is >> std::ws).eof()) {
        throw InvalidArgument(key + ": cannot parse '" + text + "'");
    }
    if constexpr (std::is_unsigned_v<T>) {
        if (text.find('-') != std::string::npos) throw InvalidArgument(key + ": must be >= 0");
    }
    return v;
}

inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "command") c.command = command_from_string(value);
    else if (key == "problem") c.problem = value;
    else if (key == "alpha") c.alpha = parse_number<double>(key, value);
    else if (key == "nx") c.nx = parse_number<std::size_t>(key, value);
    else if (key == "dt") c.dt = parse_number<double>(key, value);
    else if (key == "gamma") c.gamma = parse_number<double>(key, value);
    else if (key == "T") c.T = parse_number<double>(key, value);
    else if (key == "ref_refine") c.ref_refine = parse_number<std::size_t>(key, value);
    else if (key == "out") c.out_path = value;
    else if (key == "fit_points") c.fit_points = parse_number<std::size_t>(key, value);
    else if (key == "frames") c.frames = parse_number<std::size_t>(key, value);
    else if (key == "max_frames") c.max_frames = parse_number<std::size_t>(key, value);
    else if (key == "dt_floor") c.dt_floor = parse_number<double>(key, value);
    else throw InvalidArgument(key + ": unknown configuration key");
}

}  // namespace detail

/// Applies `key = value` lines ('#' starts a comment) on top of `base`.
inline RunConfig apply_config_text(RunConfig base, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
        }
        detail::apply_setting(base, detail::trim(body.substr(0, eq)),
                              detail::trim(body.substr(eq + 1)));
    }
    return base;
}

/// Config file form of `c`; apply_config_text(RunConfig{}, render_config(c)) == c.
inline std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    if (c.command != Command::none) os << "command = " << to_string(c.command) << '\n';
    os << "problem = " << c.problem << '\n'
       << "alpha = " << c.alpha << '\n'
       << "nx = " << c.nx << '\n';
    if (c.dt) os << "dt = " << *c.dt << '\n';
    os << "gamma = " << c.gamma << '\n'
       << "T = " << c.T << '\n'
       << "ref_refine = " << c.ref_refine << '\n';
    if (!c.out_path.empty()) os << "out = " << c.out_path << '\n';
    os << "fit_points = " << c.fit_points << '\n'
       << "frames = " << c.frames << '\n'
       << "max_frames = " << c.max_frames << '\n'
       << "dt_floor = " << c.dt_floor << '\n';
    return os.str();
}

inline std::string read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot read file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Builds a RunConfig from defaults, then the config file (either `file` or a
/// `--config` flag in `args`), then command-line flags. `args` excludes the
/// program name.
inline RunConfig parse_config(const std::vector<std::string>& args,
                              const std::optional<std::filesystem::path>& file = std::nullopt) {
    std::optional<std::filesystem::path> config_path = file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    RunConfig cfg;
    if (config_path) cfg = apply_config_text(cfg, read_config_file(*config_path));

    CLI::App app{"Semilinear subdiffusion solver and verification harness", "subdiff"};
    std::string command;
    std::string config_sink;
    double dt = 0.0;
    app.add_option("command", command, "solve | order | timeerr | selftest");
    app.add_option("--config", config_sink, "key = value configuration file");
    app.add_option("--problem", cfg.problem, "problem identifier");
    app.add_option("--alpha", cfg.alpha, "fractional order in (0,1)");
    app.add_option("--nx", cfg.nx, "number of elements (h = 1/nx)");
    auto* dt_opt = app.add_option("--dt", dt, "time step (solve/order; timeerr overrides the rule)");
    app.add_option("--gamma", cfg.gamma, "prefactor of the step rule");
    app.add_option("--T", cfg.T, "final time");
    app.add_option("--ref-refine", cfg.ref_refine, "reference refinement factor (2, 4, 8)");
    app.add_option("--out", cfg.out_path, "output CSV path (default: stdout)");
    app.add_option("--fit-points", cfg.fit_points, "points in the power-law fit");
    app.add_option("--frames", cfg.frames, "solve: dump every k-th frame");
    app.add_option("--max-frames", cfg.max_frames, "timeerr: steps marched (0 = up to T)");
    app.add_option("--dt-floor", cfg.dt_floor, "lower bound of the step rule");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw InvalidArgument(std::string("usage: ") + e.what());
    }
    if (!command.empty()) cfg.command = command_from_string(command);
    if (dt_opt->count() > 0) cfg.dt = dt;
    validate(cfg);
    return cfg;
}

}  // namespace subdiff
