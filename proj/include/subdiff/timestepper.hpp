#pragma once

#include "subdiff/error.hpp"
#include "subdiff/fem1d.hpp"
#include "subdiff/fraccalc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace subdiff {

/// Hard cap on the number of time steps of a single march.
inline constexpr std::size_t max_time_steps = 2'000'000;

/// Uniform temporal grid t_n = n * tau, n = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double tau, std::size_t n_steps) : tau_(tau), n_steps_(n_steps) {
        if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("TimeGrid: tau must be positive");
        if (n_steps == 0) throw InvalidArgument("TimeGrid: need at least one step");
    }

    /// Smallest uniform grid reaching T with step at most dt_max.
    static TimeGrid covering(double horizon, double dt_max) {
        if (!(horizon > 0.0) || !(dt_max > 0.0)) {
            throw InvalidArgument("TimeGrid::covering: horizon and step must be positive");
        }
        const double ratio = horizon / dt_max;
        if (ratio > static_cast<double>(max_time_steps)) {
            throw StepCapError("time grid would need " + std::to_string(ratio) +
                               " steps, above the cap of " + std::to_string(max_time_steps));
        }
        auto n = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
        n = std::max<std::size_t>(n, 1);
        return TimeGrid(horizon / static_cast<double>(n), n);
    }

    double tau() const noexcept { return tau_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double horizon() const noexcept { return tau_ * static_cast<double>(n_steps_); }
    double time(std::size_t n) const noexcept { return tau_ * static_cast<double>(n); }

    /// Same step, fewer steps.
    TimeGrid truncated(std::size_t n_steps) const {
        return TimeGrid(tau_, std::min(n_steps, n_steps_));
    }

private:
    double tau_;
    std::size_t n_steps_;
};

/// Exact solution of the form u(x,t) = P(t) X(x) with a polynomial P.
/// Used to check a manufactured source against the PDE analytically.
struct ManufacturedSolution {
    std::vector<double> time_poly;  ///< P(t) = sum_k time_poly[k] t^k
    std::function<double(double)> space;
    std::function<double(double)> space_dx;
    std::function<double(double)> space_dxx;
};

/// Data of a semilinear subdiffusion problem on (0,1) with zero Dirichlet values.
struct ProblemSpec {
    std::string name;
    std::function<double(double, double)> diffusivity;          ///< D(x, t)
    std::function<double(double, double)> diffusivity_dx;       ///< dD/dx, may be empty
    std::function<double(double, double, double)> source;       ///< f(x, t, u)
    std::function<double(double)> initial;                      ///< phi(x)
    std::optional<std::function<double(double, double)>> exact;  ///< u(x, t)
    std::optional<ManufacturedSolution> manufactured;
    double p_nominal = 2.0;    ///< smoothness index of phi
    double lipschitz = 0.0;    ///< Lipschitz constant of f in u (on the state band)
    double d_minus = 0.0;      ///< lower bound of D
    double d_plus = 0.0;       ///< upper bound of D
    std::optional<double> state_bound;  ///< |u| must stay below this
};

/// u^0 .. u^N interior coefficients of the fully discrete solution.
class SolutionHistory {
public:
    SolutionHistory(TimeGrid grid, Mesh1D mesh, std::vector<std::vector<double>> frames)
        : grid_(grid), mesh_(mesh), frames_(std::move(frames)) {
        if (frames_.size() != grid_.n_steps() + 1) {
            throw InvalidArgument("SolutionHistory: frame count does not match the time grid");
        }
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    const Mesh1D& mesh() const noexcept { return mesh_; }
    std::size_t size() const noexcept { return frames_.size(); }
    std::span<const double> coeffs(std::size_t n) const { return frames_.at(n); }
    FEFunction frame(std::size_t n) const { return FEFunction(mesh_, frames_.at(n)); }
    FEFunction final_frame() const { return frame(frames_.size() - 1); }
    const std::vector<std::vector<double>>& frames() const noexcept { return frames_; }

private:
    TimeGrid grid_;
    Mesh1D mesh_;
    std::vector<std::vector<double>> frames_;
};

/// State at which the source is evaluated in step n: 2u^{n-1} - u^{n-2}
/// for n >= 2 and u^0 for n = 1 (`older` is ignored then).
inline std::vector<double> extrapolate_state(std::span<const double> older,
                                             std::span<const double> newer, std::size_t n) {
    if (n == 0) throw InvalidArgument("extrapolate_state: step index must be >= 1");
    if (n == 1) return {newer.begin(), newer.end()};
    if (older.size() != newer.size()) {
        throw InvalidArgument("extrapolate_state: frame size mismatch");
    }
    std::vector<double> out(newer.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2.0 * newer[i] - older[i];
    return out;
}

/// Marches the Galerkin system with the L1 scheme. Each step solves
///
///   (beta M + A(t_n)) u^n = beta M (b_{n-1} u^0 + sum_{k=1}^{n-1} (b_{n-1-k} - b_{n-k}) u^k)
///                           + (f(., t_n, ubar^n), phi_i)
///
/// with beta = tau^-alpha / Gamma(2 - alpha), the stiffness reassembled at
/// t_n and ubar^n from extrapolate_state. u^0 = P_h phi.
inline SolutionHistory march(const ProblemSpec& prob, const Mesh1D& mesh, const TimeGrid& grid,
                             FracOrder alpha) {
    const std::size_t n_steps = grid.n_steps();
    if (n_steps > max_time_steps) {
        throw StepCapError("march: " + std::to_string(n_steps) + " steps exceed the cap of " +
                           std::to_string(max_time_steps));
    }
    const std::size_t dim = mesh.n_interior();
    const double tau = grid.tau();
    const auto mass = assemble_mass(mesh);
    const auto weights = l1_weights(alpha, n_steps);
    const double beta = weights.scale(tau);

    std::vector<std::vector<double>> frames;
    frames.reserve(n_steps + 1);
    {
        const auto u0 = l2_project(mesh, prob.initial);
        frames.emplace_back(u0.coeffs().begin(), u0.coeffs().end());
    }

    std::vector<double> hist(dim);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        const double t = grid.time(n);

        std::fill(hist.begin(), hist.end(), 0.0);
        {
            const double b0w = weights[n - 1];
            const auto& u0 = frames[0];
            for (std::size_t i = 0; i < dim; ++i) hist[i] = b0w * u0[i];
        }
        for (std::size_t k = 1; k < n; ++k) {
            const double c = weights[n - 1 - k] - weights[n - k];
            const auto& uk = frames[k];
            for (std::size_t i = 0; i < dim; ++i) hist[i] += c * uk[i];
        }
        auto rhs = mass.apply(hist);
        for (double& v : rhs) v *= beta;

        const std::span<const double> older =
            n >= 2 ? std::span<const double>(frames[n - 2]) : std::span<const double>();
        const FEFunction ubar(mesh, extrapolate_state(older, frames[n - 1], n));
        const auto load = detail::assemble_load_local(
            mesh, [&](std::size_t e, double x, double pl, double pr) {
                const double u = pl * ubar.nodal_value(e) + pr * ubar.nodal_value(e + 1);
                return prob.source(x, t, u);
            });
        for (std::size_t i = 0; i < dim; ++i) rhs[i] += load[i];

        const auto system = assemble_stiffness(mesh, prob.diffusivity, t).combine(1.0, mass, beta);
        auto un = solve_tridiag(system, rhs);

        for (double v : un) {
            if (!std::isfinite(v)) throw DivergenceError("march: non-finite state", n);
            if (prob.state_bound && std::abs(v) > *prob.state_bound) {
                throw DivergenceError("march: state left the band |u| <= " +
                                          std::to_string(*prob.state_bound),
                                      n);
            }
        }
        frames.push_back(std::move(un));
    }
    return SolutionHistory(grid, mesh, std::move(frames));
}

}  // namespace subdiff
