// Prints the closed-form SDP values of the Hadamard-block family and the
// satisfiability crossing of the k = 1 (sorting) case.

#include <cstdio>

#include "spectralab/experiments.hpp"

int main() {
    using namespace spectralab;
    std::printf("k=1 satisfiability proxy 1/2 + value crosses 1 at c = %.12f\n",
                experiments::sort4_threshold_root());
    for (int c = 2; c <= 8; ++c) {
        const double v = sdp::sdp_value_formula(std::sqrt(2.0), -std::sqrt(2.0), c);
        std::printf("c=%d  value=%.6f  1/2+value=%.6f  %s\n", c, v, 0.5 + v,
                    0.5 + v < 1.0 ? "unsat certified" : "not certified");
    }
    return 0;
}
