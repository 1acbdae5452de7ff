#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ur/errors.hpp"
#include "ur/tolerances.hpp"
#include "ur/operators.hpp"

namespace ur {

// Canonical pairs (X_1, Y_1, ..., X_m, Y_m) with [X_k, Y_k] = i c.
struct CanonicalAlgebra {
    int modes = 1;
    double comm_constant = 0.5;

    // 2m x 2m commutation form: [z_a, z_b] = i Omega_ab.
    Eigen::MatrixXd omega() const;
};

// First-degree polynomial in the canonical coordinates.
struct LinearObservable {
    Eigen::VectorXd coeffs; // length 2m, coordinate order as above
    double offset = 0.0;
};

// Gaussian state data: mean vector and symmetrized covariance.
struct GaussianMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    static GaussianMoments vacuum(const CanonicalAlgebra& alg);
};

// Heisenberg-picture linear map z -> S z; S must preserve omega.
class LinearChannel {
  public:
    LinearChannel(Eigen::MatrixXd s, const CanonicalAlgebra& alg, const Tolerances& tol = {});
    const Eigen::MatrixXd& matrix() const { return s_; }

  private:
    Eigen::MatrixXd s_;
};

// Measurement model in the linear-Gaussian backend. Coordinates are the
// object modes followed by the probe modes; every observable carries
// full-length coefficients but must be supported on its own subsystem.
struct GaussianMeasurementModel {
    int object_modes = 1;
    int probe_modes = 1;
    double comm_constant = 0.5;

    std::vector<LinearObservable> a_obs; // object, measured
    std::vector<LinearObservable> b_obs; // object, disturbed
    std::vector<LinearObservable> m_obs; // probe, meter

    Eigen::MatrixXd channel; // 2(obj+probe) square, symplectic for omega

    GaussianMoments object_moments;
    GaussianMoments probe_moments;

    CanonicalAlgebra algebra() const {
        return CanonicalAlgebra{object_modes + probe_modes, comm_constant};
    }
};

std::complex<double> lin_commutator(const LinearObservable& u, const LinearObservable& v,
                                    const CanonicalAlgebra& alg);

double moment_expectation(const LinearObservable& u, const GaussianMoments& mom);

// Symmetrized covariance <sym(du, dv)> of two linear observables.
double moment_sym_cov(const LinearObservable& u, const LinearObservable& v,
                      const GaussianMoments& mom);

LinearObservable apply_channel(const LinearChannel& chan, const LinearObservable& u);

// Eigenvalue test of cov + (i/2) Omega; negative directions flag moments
// that no quantum state attains.
PsdVerdict physicality_check(const GaussianMoments& mom, const CanonicalAlgebra& alg,
                             const Tolerances& tol = {});

// Two-mode backaction-evading amplifier at the given gain: object mode a,
// probe mode b, meter reads X_b / gain, interaction feeds gain * X_a into
// X_b while pushing -gain * Y_b back onto Y_a. The probe moments carry the
// cross-correlated covariance that defeats the matrix-form bound; object
// moments default to vacuum.
GaussianMeasurementModel bae_model(double gain);
GaussianMeasurementModel bae_model(double gain, const GaussianMoments& object_moments);

} // namespace ur
