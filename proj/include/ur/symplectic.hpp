#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ur/measurement.hpp"

namespace ur {

// Block commutation form [[0, I], [-I, 0]] on collective (A..., B...)
// coordinates; 2n x 2n.
Eigen::MatrixXd symplectic_form(int n);

struct SymplecticCheck {
    bool ok = false;
    double residual = 0.0; // max |S J S^T - J|
};

SymplecticCheck is_symplectic(const Eigen::MatrixXd& s, double tol = 1e-10);

// exp(J h) for symmetric h; every symplectic map near the identity arises
// this way.
Eigen::MatrixXd symplectic_exp(const Eigen::MatrixXd& h_sym);

Eigen::MatrixXd random_symplectic(int n, std::uint64_t seed);

struct TransformedND {
    Eigen::MatrixXd k, gamma, g; // congruences S (.) S^T
};

TransformedND transform_nd(const Eigen::MatrixXd& s, const Eigen::MatrixXd& k,
                           const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& g);

// Planar rotation [[cos, sin], [-sin, cos]]; symplectic for n = 1.
Eigen::Matrix2d rotation2(double angle);

// Noise-disturbance frame rotation for a single measured pair with no
// cross commutator (gamma = 0). Records the quarter-turn scalar form as
// published; the matrix verdicts on both sides of the congruence are the
// ground truth.
struct RotatedOzawa {
    double angle = 0.0;
    double gamma_scale = 0.0; // g in G = g [[0,1],[-1,0]]
    Eigen::Matrix2d k_before, k_after;
    double eps_sq_before = 0.0, eta_sq_before = 0.0, cross_before = 0.0;
    double eps_sq_after = 0.0, eta_sq_after = 0.0, cross_after = 0.0;
    InequalityCheck scalar_before;  // eps * eta >= |g| / 2
    InequalityCheck rotated_scalar; // eps'^2 + eta'^2 >= sqrt(1 + 4 cross'^2), as published
    PsdVerdict matrix_before, matrix_after;
};

RotatedOzawa rotated_ozawa_experiment(const MeasurementModel& model, double angle,
                                      const Tolerances& tol = {});

} // namespace ur
