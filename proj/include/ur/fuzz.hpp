#pragma once

#include <cstdint>
#include <vector>

#include "ur/model_io.hpp"

namespace ur {

enum class FuzzBackend { finite, gaussian };

struct FuzzConfig {
    FuzzBackend backend = FuzzBackend::finite;
    int object_dim = 2;   // finite backend
    int probe_dim = 2;
    int object_modes = 1; // gaussian backend
    int probe_modes = 1;
    int n = 1;            // measured pairs per model
    int trials = 100;
    std::uint64_t seed = 1;
    int lambdas_per_trial = 8;
    // Gaussian campaigns start from the amplifier with the correlated
    // probe moments, the known matrix-violating point.
    bool include_amplifier_point = true;
    Tolerances tol;
};

struct FuzzTrialStat {
    int index = -1;
    double oup_margin = 0.0;  // min eigenvalue over spectral scale
    double ozawa_slack = 0.0; // min over pairs of lhs - rhs
    double identity_residual = 0.0;
    bool physical = true;
    bool matrix_holds = true;
    bool ozawa_holds = true;
};

struct FuzzSummary {
    FuzzConfig config;
    int trials_run = 0;
    int physical_trials = 0;
    int violations_physical = 0;   // expected to stay 0
    int violations_unphysical = 0;
    int scalar_slack_matrix_tight = 0; // Ozawa slack while the matrix margin is near zero
    double max_identity_residual = 0.0;
    double mean_identity_residual = 0.0;
    FuzzTrialStat min_margin_physical;
    FuzzTrialStat max_identity_trial;
    Json min_margin_model;  // serialized for replay
    Json max_identity_model;
    std::vector<FuzzTrialStat> violating;
    std::vector<Json> violating_models; // capped
};

FuzzSummary run_fuzz(const FuzzConfig& config);

Json fuzz_to_json(const FuzzSummary& summary);
std::string fuzz_to_text(const FuzzSummary& summary);

// Seeded generators behind the campaign, reusable from tests.
FiniteMeasurementModel random_finite_model(int object_dim, int probe_dim, int n,
                                           std::uint64_t seed, const Tolerances& tol = {});
GaussianMeasurementModel random_gaussian_model(int object_modes, int probe_modes, int n,
                                               std::uint64_t seed, const Tolerances& tol = {});

Eigen::MatrixXcd haar_unitary(Eigen::Index dim, std::uint64_t seed);
Eigen::VectorXcd random_unit_vector(Eigen::Index dim, std::uint64_t seed);
Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::uint64_t seed);

} // namespace ur
