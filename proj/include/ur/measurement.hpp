#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ur/gaussian.hpp"
#include "ur/operators.hpp"

namespace ur {

// Indirect measurement scheme on a finite-dimensional object + probe pair.
// a_obs are the measured observables, b_obs the ones watched for
// disturbance, m_obs the meter observables read off the probe after the
// interaction. Each family must commute internally.
struct FiniteMeasurementModel {
    QuantumState object_state;
    QuantumState probe_state;
    std::vector<Operator> a_obs;
    std::vector<Operator> b_obs;
    std::vector<Operator> m_obs;
    Operator interaction;
};

using MeasurementModel = std::variant<FiniteMeasurementModel, GaussianMeasurementModel>;

// Collective in/out observables for n measured pairs. Index order is
// (A_1..A_n, B_1..B_n); z_out holds (M_1^out..M_n^out, B_1^out..B_n^out)
// and k_vec the noise operators followed by the disturbance operators.
struct FiniteNDSystem {
    int n = 0;
    std::vector<Operator> z_in;
    std::vector<Operator> z_out;
    std::vector<Operator> k_vec;
    QuantumState state; // composite object x probe
    double out_commutation_residual = 0.0;
    double reconstruction_residual = 0.0;
};

struct GaussianNDSystem {
    int n = 0;
    CanonicalAlgebra algebra;
    std::vector<LinearObservable> z_in;
    std::vector<LinearObservable> z_out;
    std::vector<LinearObservable> k_vec;
    GaussianMoments moments; // composite block-diagonal moments
    double out_commutation_residual = 0.0;
    double reconstruction_residual = 0.0;
};

FiniteNDSystem build_nd_system(const FiniteMeasurementModel& model, const Tolerances& tol = {});
GaussianNDSystem build_nd_system(const GaussianMeasurementModel& model, const Tolerances& tol = {});

// Symmetrized covariance matrix of the noise-disturbance vector; the
// diagonal carries the squared noise and disturbance figures.
Eigen::MatrixXd nd_covariance(const FiniteNDSystem& sys, const QuantumState& state,
                              const Tolerances& tol = {});
Eigen::MatrixXd nd_covariance(const GaussianNDSystem& sys, const GaussianMoments& moments,
                              const Tolerances& tol = {});

// Cross commutator matrix (1/i) <[Z_a, K_b] + [K_a, Z_b]>.
Eigen::MatrixXd gamma_matrix(const FiniteNDSystem& sys, const QuantumState& state,
                             const Tolerances& tol = {});
Eigen::MatrixXd gamma_matrix(const GaussianNDSystem& sys, const GaussianMoments& moments,
                             const Tolerances& tol = {});

// Input commutator matrix (1/i) <[Z_a, Z_b]>.
Eigen::MatrixXd g_matrix(const FiniteNDSystem& sys, const QuantumState& state,
                         const Tolerances& tol = {});
Eigen::MatrixXd g_matrix(const GaussianNDSystem& sys, const GaussianMoments& moments,
                         const Tolerances& tol = {});

struct MatrixOupResult {
    Eigen::MatrixXcd matrix; // K + (i/2)(Gamma + G)
    PsdVerdict verdict;
};

MatrixOupResult matrix_oup(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gamma,
                           const Eigen::MatrixXd& g, const Tolerances& tol = {});

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

// Scalar consequences of the 2x2 principal block (alpha = i, beta = n + j).
struct DetChain {
    double variance_product = 0.0;  // K_aa * K_bb
    double cross_sq = 0.0;          // K_ab^2
    double comm_sq = 0.0;           // ((Gamma + G)_ab)^2 / 4
    bool det_bound_holds = true;    // variance_product >= cross_sq + comm_sq
    InequalityCheck gap_bound;        // eps*eta >= ||Gamma| - |G|| / 2
    InequalityCheck difference_bound; // eps*eta >= (|G| - |Gamma|) / 2
};

struct PairReport {
    int i = 0; // measured observable index, 0-based
    int j = 0; // disturbed observable index, 0-based
    InequalityCheck ozawa;         // eps*eta + eps*sigma_b + sigma_a*eta >= c
    InequalityCheck heisenberg_nd; // eps*eta >= c (informational, not certified)
    InequalityCheck robertson;     // sigma_a*sigma_b >= c
    DetChain det_chain;
};

struct Diagnostics {
    double out_commutation_residual = 0.0;
    double reconstruction_residual = 0.0;
    double derivation_identity_residual = 0.0; // max |<G> + <cross> + <[K,K]>| entry
    double k_imag_residual = 0.0;
    double k_symmetry_residual = 0.0;
    double gamma_imag_residual = 0.0;
    double gamma_skew_residual = 0.0;
    double g_imag_residual = 0.0;
    double g_skew_residual = 0.0;
};

struct UncertaintyReport {
    std::string backend; // "finite" or "gaussian"
    int n = 0;

    Eigen::MatrixXd k_matrix;  // 2n x 2n
    Eigen::MatrixXd gamma;
    Eigen::MatrixXd g_exp;
    Eigen::MatrixXd sigma_in;  // symmetrized covariance of Z^in

    Eigen::MatrixXcd oup_matrix;
    PsdVerdict matrix_oup;

    std::vector<double> epsilon; // noise per measured observable
    std::vector<double> eta;     // disturbance per watched observable
    std::vector<double> sigma_a; // prior spread of A_i
    std::vector<double> sigma_b; // prior spread of B_j

    std::vector<PairReport> pairs; // all (i, j), row-major

    PsdVerdict rsup; // sigma_in + (i/2) g_exp >= 0 on the input state

    bool independent_intervention = false;

    // Gaussian backend only: does any quantum state attain these moments?
    std::optional<PsdVerdict> object_physicality;
    std::optional<PsdVerdict> probe_physicality;

    Diagnostics diagnostics;

    // Drives the exit code: matrix check, Ozawa, Robertson, state
    // positivity and the determinant-chain bounds. The unamended
    // noise-disturbance product (heisenberg_nd) is excluded; it has
    // long-known counterexamples and is reported for information only.
    bool all_hold = false;
};

UncertaintyReport analyze(const FiniteMeasurementModel& model, const Tolerances& tol = {});
UncertaintyReport analyze(const GaussianMeasurementModel& model, const Tolerances& tol = {});
UncertaintyReport analyze(const MeasurementModel& model, const Tolerances& tol = {});

// Sesquilinear probe of the closure identity behind the matrix bound: for
// each lambda, |lambda^dag (<G> + <cross> + <[dK, dK]>) lambda| must vanish
// and lambda^dag (K + (i/2)(Gamma + G)) lambda must be real.
struct IdentityProbe {
    double identity_residual = 0.0;
    double form_value = 0.0;
    double form_imag_residual = 0.0;
};

struct IdentityReport {
    std::vector<IdentityProbe> probes;
    double max_identity_residual = 0.0;
    double min_form_value = 0.0;
    bool matrix_psd = true;
    // Present when the matrix check fails: unit vector with negative form.
    std::optional<Eigen::VectorXcd> refuting_lambda;
    double refuting_form_value = 0.0;
};

IdentityReport derivation_identity_check(const FiniteNDSystem& sys, const QuantumState& state,
                                         const std::vector<Eigen::VectorXcd>& lambdas,
                                         const Tolerances& tol = {});
IdentityReport derivation_identity_check(const GaussianNDSystem& sys,
                                         const GaussianMoments& moments,
                                         const std::vector<Eigen::VectorXcd>& lambdas,
                                         const Tolerances& tol = {});

// Preparation-only uncertainty checks, no measurement involved.
InequalityCheck robertson_check(const Operator& a, const Operator& b, const QuantumState& s,
                                const Tolerances& tol = {});
PsdVerdict rsup_check(const std::vector<Operator>& zs, const QuantumState& s,
                      const Tolerances& tol = {});

// 0 when every certified inequality holds, 2 otherwise.
int verdict_exit_code(const UncertaintyReport& report);

} // namespace ur
