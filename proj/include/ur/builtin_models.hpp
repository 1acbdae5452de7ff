#pragma once

#include "ur/measurement.hpp"

namespace ur {

// Qubit pair, trivial interaction: the probe never couples, so the meter
// carries pure noise and nothing is disturbed. Object state (|0> + i|1>)/sqrt(2).
FiniteMeasurementModel make_identity_model();

// Qubit pair, controlled flip onto the probe: sharp sigma_z readout
// (zero noise) that randomizes sigma_x on the object. Same object state.
FiniteMeasurementModel make_cnot_model();

// Backaction-evading amplifier realized on two truncated oscillators with
// vacuum states; matches the linear-Gaussian model up to truncation error.
FiniteMeasurementModel make_truncated_bae_model(Eigen::Index per_mode_dim, double gain,
                                                const Tolerances& tol = {});

} // namespace ur
