#pragma once

#include <Eigen/Dense>

namespace ur {

// Numerical acceptance thresholds. All residual checks scale these by the
// magnitude of the quantity under test, so the values are relative.
struct Tolerances {
    double hermitian = 1e-10;
    double unitary = 1e-10;
    double norm = 1e-10;
    double psd = 1e-10;
    Eigen::Index max_composite_dim = 4096;

    // One knob for all four thresholds (CLI --tol, UR_TOL).
    static Tolerances uniform(double t) {
        Tolerances out;
        out.hermitian = out.unitary = out.norm = out.psd = t;
        return out;
    }
};

} // namespace ur
