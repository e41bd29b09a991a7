#pragma once

#include "subdiff/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace subdiff {

namespace quad {

/// 3-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 3> gauss3_nodes = {-0.77459666924148337704, 0.0,
                                                        0.77459666924148337704};
inline constexpr std::array<double, 3> gauss3_weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace quad

/// Uniform partition of [0, 1] into n_elements cells.
class Mesh1D {
public:
    explicit Mesh1D(std::size_t n_elements) : n_(n_elements) {
        if (n_elements < 2) {
            throw InvalidArgument("mesh needs at least 2 elements, got " +
                                  std::to_string(n_elements));
        }
    }

    std::size_t n_elements() const noexcept { return n_; }
    std::size_t n_nodes() const noexcept { return n_ + 1; }
    std::size_t n_interior() const noexcept { return n_ - 1; }
    double h() const noexcept { return 1.0 / static_cast<double>(n_); }

    double node(std::size_t i) const noexcept {
        return static_cast<double>(i) / static_cast<double>(n_);
    }

    std::vector<double> nodes() const {
        std::vector<double> x(n_nodes());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = node(i);
        return x;
    }

    /// Element containing x; the right endpoint belongs to the last element.
    std::size_t element_of(double x) const noexcept {
        const double s = x * static_cast<double>(n_);
        if (!(s > 0.0)) return 0;
        return std::min(static_cast<std::size_t>(s), n_ - 1);
    }

    friend bool operator==(const Mesh1D&, const Mesh1D&) = default;

private:
    std::size_t n_;
};

inline Mesh1D make_mesh(std::size_t n_elements) { return Mesh1D(n_elements); }

/// Continuous piecewise-linear function vanishing at x = 0 and x = 1,
/// stored by its interior nodal values.
class FEFunction {
public:
    FEFunction(Mesh1D mesh, std::vector<double> coeffs)
        : mesh_(mesh), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != mesh_.n_interior()) {
            throw InvalidArgument("FEFunction: expected " + std::to_string(mesh_.n_interior()) +
                                  " coefficients, got " + std::to_string(coeffs_.size()));
        }
    }

    explicit FEFunction(Mesh1D mesh) : FEFunction(mesh, std::vector<double>(mesh.n_interior())) {}

    const Mesh1D& mesh() const noexcept { return mesh_; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::vector<double>& mutable_coeffs() noexcept { return coeffs_; }

    /// Value at global node i, including the zero boundary values.
    double nodal_value(std::size_t i) const {
        if (i == 0 || i >= mesh_.n_elements()) return 0.0;
        return coeffs_[i - 1];
    }

    double operator()(double x) const {
        const std::size_t e = mesh_.element_of(x);
        const double s = (x - mesh_.node(e)) / mesh_.h();
        return (1.0 - s) * nodal_value(e) + s * nodal_value(e + 1);
    }

    /// Slope on element e.
    double slope(std::size_t e) const {
        return (nodal_value(e + 1) - nodal_value(e)) / mesh_.h();
    }

    double derivative(double x) const { return slope(mesh_.element_of(x)); }

private:
    Mesh1D mesh_;
    std::vector<double> coeffs_;
};

/// Symmetric tridiagonal operator: diagonal plus one shared off-diagonal.
class TriDiagonalOperator {
public:
    TriDiagonalOperator() = default;

    TriDiagonalOperator(std::vector<double> diag, std::vector<double> off)
        : diag_(std::move(diag)), off_(std::move(off)) {
        if (diag_.empty() || off_.size() + 1 != diag_.size()) {
            throw InvalidArgument("TriDiagonalOperator: off-diagonal must have dim-1 entries");
        }
    }

    explicit TriDiagonalOperator(std::size_t dim)
        : diag_(dim, 0.0), off_(dim > 0 ? dim - 1 : 0, 0.0) {}

    std::size_t dim() const noexcept { return diag_.size(); }
    std::span<const double> diag() const noexcept { return diag_; }
    std::span<const double> off() const noexcept { return off_; }
    std::vector<double>& mutable_diag() noexcept { return diag_; }
    std::vector<double>& mutable_off() noexcept { return off_; }

    std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != dim()) throw InvalidArgument("TriDiagonalOperator::apply: size mismatch");
        std::vector<double> y(dim());
        const std::size_t n = dim();
        for (std::size_t i = 0; i < n; ++i) {
            double v = diag_[i] * x[i];
            if (i > 0) v += off_[i - 1] * x[i - 1];
            if (i + 1 < n) v += off_[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }

    double quadratic_form(std::span<const double> x) const {
        const auto y = apply(x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += x[i] * y[i];
        return s;
    }

    /// Maximum absolute row sum.
    double norm_inf() const {
        double m = 0.0;
        const std::size_t n = dim();
        for (std::size_t i = 0; i < n; ++i) {
            double r = std::abs(diag_[i]);
            if (i > 0) r += std::abs(off_[i - 1]);
            if (i + 1 < n) r += std::abs(off_[i]);
            m = std::max(m, r);
        }
        return m;
    }

    /// a * this + b * other
    TriDiagonalOperator combine(double a, const TriDiagonalOperator& other, double b) const {
        if (other.dim() != dim()) throw InvalidArgument("TriDiagonalOperator::combine: size mismatch");
        TriDiagonalOperator r(dim());
        for (std::size_t i = 0; i < dim(); ++i) r.diag_[i] = a * diag_[i] + b * other.diag_[i];
        for (std::size_t i = 0; i < off_.size(); ++i) r.off_[i] = a * off_[i] + b * other.off_[i];
        return r;
    }

private:
    std::vector<double> diag_;
    std::vector<double> off_;
};

/// Solves A x = rhs by symmetric (LDL^T) Thomas elimination.
/// Throws NotSpdError on a non-positive pivot.
inline std::vector<double> solve_tridiag(const TriDiagonalOperator& a, std::span<const double> rhs) {
    const std::size_t n = a.dim();
    if (rhs.size() != n) throw InvalidArgument("solve_tridiag: rhs size does not match operator");
    const auto diag = a.diag();
    const auto off = a.off();

    std::vector<double> d(n);
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        double pivot = diag[i];
        if (i > 0) {
            const double l = off[i - 1] / d[i - 1];
            pivot -= l * off[i - 1];
            x[i] -= l * x[i - 1];
        }
        if (!(pivot > 0.0)) throw NotSpdError("solve_tridiag: matrix is not SPD", i);
        d[i] = pivot;
    }
    x[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = (x[i] - off[i] * x[i + 1]) / d[i];
    }
    return x;
}

namespace detail {

/// Loops over the 3 Gauss points of every element; calls
/// visit(element, x, weight, phi_left, phi_right).
template <class Visit>
void for_each_quadrature_point(const Mesh1D& mesh, Visit&& visit) {
    const double h = mesh.h();
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const double mid = 0.5 * (mesh.node(e) + mesh.node(e + 1));
        for (std::size_t q = 0; q < 3; ++q) {
            const double xi = quad::gauss3_nodes[q];
            const double x = mid + 0.5 * h * xi;
            const double w = 0.5 * h * quad::gauss3_weights[q];
            visit(e, x, w, 0.5 * (1.0 - xi), 0.5 * (1.0 + xi));
        }
    }
}

/// Load vector for an integrand given element-wise: g(e, x, phi_left, phi_right).
template <class Integrand>
std::vector<double> assemble_load_local(const Mesh1D& mesh, Integrand&& g) {
    std::vector<double> load(mesh.n_interior(), 0.0);
    const std::size_t n = mesh.n_elements();
    for_each_quadrature_point(mesh, [&](std::size_t e, double x, double w, double pl, double pr) {
        const double val = g(e, x, pl, pr);
        if (!std::isfinite(val)) throw AssemblyError("load assembly: non-finite integrand", e);
        if (e >= 1) load[e - 1] += w * val * pl;
        if (e + 1 < n) load[e] += w * val * pr;
    });
    return load;
}

}  // namespace detail

/// Gram matrix of the interior hat functions.
inline TriDiagonalOperator assemble_mass(const Mesh1D& mesh) {
    const double h = mesh.h();
    const std::size_t m = mesh.n_interior();
    return TriDiagonalOperator(std::vector<double>(m, 2.0 * h / 3.0),
                               std::vector<double>(m - 1, h / 6.0));
}

/// Stiffness matrix with entries int D(x,t) phi_i' phi_j' dx (3-point Gauss per element).
template <class Diffusivity>
    requires std::invocable<const Diffusivity&, double, double>
TriDiagonalOperator assemble_stiffness(const Mesh1D& mesh, const Diffusivity& diffusivity,
                                       double t) {
    const std::size_t n = mesh.n_elements();
    const double h = mesh.h();
    TriDiagonalOperator a(mesh.n_interior());
    auto& diag = a.mutable_diag();
    auto& off = a.mutable_off();
    for (std::size_t e = 0; e < n; ++e) {
        const double mid = 0.5 * (mesh.node(e) + mesh.node(e + 1));
        double integral = 0.0;
        for (std::size_t q = 0; q < 3; ++q) {
            const double dv = diffusivity(mid + 0.5 * h * quad::gauss3_nodes[q], t);
            if (!std::isfinite(dv)) {
                throw AssemblyError("stiffness assembly: non-finite diffusivity", e);
            }
            integral += quad::gauss3_weights[q] * dv;
        }
        const double k = 0.5 * h * integral / (h * h);
        if (e >= 1) diag[e - 1] += k;
        if (e + 1 < n) diag[e] += k;
        if (e >= 1 && e + 1 < n) off[e - 1] -= k;
    }
    return a;
}

/// Load vector (g, phi_i).
template <class Source>
    requires std::invocable<const Source&, double>
std::vector<double> assemble_load(const Mesh1D& mesh, const Source& g) {
    return detail::assemble_load_local(
        mesh, [&](std::size_t, double x, double, double) { return g(x); });
}

/// Nodal interpolant into V_h (boundary values are dropped).
template <class Fn>
    requires std::invocable<const Fn&, double>
FEFunction interpolate(const Mesh1D& mesh, const Fn& v) {
    std::vector<double> c(mesh.n_interior());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = v(mesh.node(i + 1));
    return FEFunction(mesh, std::move(c));
}

/// Orthogonal L2 projection P_h v.
template <class Fn>
    requires std::invocable<const Fn&, double>
FEFunction l2_project(const Mesh1D& mesh, const Fn& v) {
    const auto load = assemble_load(mesh, v);
    return FEFunction(mesh, solve_tridiag(assemble_mass(mesh), load));
}

/// Ritz projection R_h v for the form a(D(t); u, w) = int D u' w'.
/// Needs the derivative dv of the target.
template <class Diffusivity, class Deriv>
    requires std::invocable<const Diffusivity&, double, double> &&
             std::invocable<const Deriv&, double>
FEFunction ritz_project(const Mesh1D& mesh, const Diffusivity& diffusivity, double t,
                        const Deriv& dv) {
    const std::size_t n = mesh.n_elements();
    const double h = mesh.h();
    std::vector<double> load(mesh.n_interior(), 0.0);
    detail::for_each_quadrature_point(mesh, [&](std::size_t e, double x, double w, double, double) {
        const double val = diffusivity(x, t) * dv(x);
        if (!std::isfinite(val)) throw AssemblyError("ritz load: non-finite integrand", e);
        // phi_e' = -1/h and phi_{e+1}' = +1/h on element e
        if (e >= 1) load[e - 1] -= w * val / h;
        if (e + 1 < n) load[e] += w * val / h;
    });
    return FEFunction(mesh, solve_tridiag(assemble_stiffness(mesh, diffusivity, t), load));
}

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};

/// L2 norm and H1 seminorm of (coarse - fine), integrated on the fine mesh.
/// The fine element count must be a multiple of the coarse one.
inline ErrorNorms fe_error_norms(const FEFunction& coarse, const FEFunction& fine) {
    const auto& cm = coarse.mesh();
    const auto& fm = fine.mesh();
    if (fm.n_elements() % cm.n_elements() != 0) {
        throw InvalidArgument("fe_error_norms: meshes are not nested (" +
                              std::to_string(cm.n_elements()) + " vs " +
                              std::to_string(fm.n_elements()) + " elements)");
    }
    const std::size_t ratio = fm.n_elements() / cm.n_elements();
    const double h = fm.h();
    double l2 = 0.0;
    double h1 = 0.0;
    for (std::size_t e = 0; e < fm.n_elements(); ++e) {
        const std::size_t ce = e / ratio;
        const double mid = 0.5 * (fm.node(e) + fm.node(e + 1));
        const double cx0 = cm.node(ce);
        for (std::size_t q = 0; q < 3; ++q) {
            const double xi = quad::gauss3_nodes[q];
            const double x = mid + 0.5 * h * xi;
            const double s = (x - cx0) / cm.h();
            const double cv = (1.0 - s) * coarse.nodal_value(ce) + s * coarse.nodal_value(ce + 1);
            const double fv = 0.5 * (1.0 - xi) * fine.nodal_value(e) +
                              0.5 * (1.0 + xi) * fine.nodal_value(e + 1);
            l2 += 0.5 * h * quad::gauss3_weights[q] * (cv - fv) * (cv - fv);
        }
        const double ds = coarse.slope(ce) - fine.slope(e);
        h1 += h * ds * ds;
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

/// L2 distance between an FE function and a callable, with each element split
/// into `refine` sub-cells carrying a 3-point Gauss rule.
template <class Fn>
    requires std::invocable<const Fn&, double>
double l2_distance(const FEFunction& u, const Fn& v, std::size_t refine = 8) {
    const auto& mesh = u.mesh();
    const double hs = mesh.h() / static_cast<double>(refine);
    double acc = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        for (std::size_t r = 0; r < refine; ++r) {
            const double mid = mesh.node(e) + (static_cast<double>(r) + 0.5) * hs;
            for (std::size_t q = 0; q < 3; ++q) {
                const double x = mid + 0.5 * hs * quad::gauss3_nodes[q];
                const double s = (x - mesh.node(e)) / mesh.h();
                const double uv = (1.0 - s) * u.nodal_value(e) + s * u.nodal_value(e + 1);
                const double d = uv - v(x);
                acc += 0.5 * hs * quad::gauss3_weights[q] * d * d;
            }
        }
    }
    return std::sqrt(acc);
}

/// L2 norm of an FE function (exact for P1 with the 3-point rule).
inline double l2_norm(const FEFunction& u) {
    return l2_distance(u, [](double) { return 0.0; }, 1);
}

}  // namespace subdiff
