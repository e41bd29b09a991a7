// Fractional relaxation of the first sine mode against its Mittag-Leffler decay.

#include "subdiff/fem1d.hpp"
#include "subdiff/problems.hpp"
#include "subdiff/timestepper.hpp"

#include <cstdio>

int main() {
    using namespace subdiff;
    const FracOrder alpha(0.5);
    const auto prob = get_problem("ml_relaxation", alpha);
    const Mesh1D mesh(64);
    const auto hist = march(prob, mesh, TimeGrid(1.0 / 256.0, 256), alpha);

    std::printf("%8s %14s %14s\n", "t", "u_h(1/2,t)", "exact");
    for (std::size_t n = 0; n <= 256; n += 32) {
        const double t = hist.grid().time(n);
        std::printf("%8.4f %14.8f %14.8f\n", t, hist.frame(n)(0.5), (*prob.exact)(0.5, t));
    }
}
