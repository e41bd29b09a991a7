// Spatial convergence orders for one benchmark across the fractional orders.
// Usage: demo_order_table [problem]   (default order2)

#include "subdiff/harness.hpp"
#include "subdiff/problems.hpp"

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    using namespace subdiff;
    const std::string name = argc > 1 ? argv[1] : "order2";
    if (!is_registered_problem(name)) {
        std::fprintf(stderr, "unknown problem '%s'\n", name.c_str());
        return 1;
    }
    std::printf("%-8s %12s %12s %8s\n", "alpha", "|u_h2-u_h|", "|u_h4-u_h2|", "p");
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const FracOrder alpha(a);
        const auto r = aitken_order(get_problem(name, alpha), alpha, 1e-2, 2e-3, 1.0);
        std::printf("%-8.2f %12.4e %12.4e %8.4f\n", a, r.norm_coarse_mid, r.norm_mid_fine, r.p_estimate);
    }
}
