#pragma once

#include <complex>

#include <Eigen/Dense>

#include "ur/errors.hpp"
#include "ur/tolerances.hpp"

namespace ur {

using Complex = std::complex<double>;

// Dense operator on a finite-dimensional Hilbert space.
class Operator {
  public:
    explicit Operator(Eigen::MatrixXcd entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Eigen::MatrixXcd& entries() const { return entries_; }

    Operator adjoint() const { return Operator(entries_.adjoint()); }

    // max-abs residuals against the declared property; 0 means exact.
    double hermiticity_residual() const;
    double unitarity_residual() const;

    static Operator identity(Eigen::Index dim);
    static Operator zero(Eigen::Index dim);

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(Complex s, const Operator& a);

  private:
    Eigen::MatrixXcd entries_;
};

// Pure state vector or density matrix, validated on construction.
class QuantumState {
  public:
    enum class Kind { pure, density };

    static QuantumState pure(Eigen::VectorXcd v, const Tolerances& tol = {});
    static QuantumState density(Eigen::MatrixXcd rho, const Tolerances& tol = {});

    // Composite state on the tensor product, left factor varying slowest.
    static QuantumState product(const QuantumState& a, const QuantumState& b,
                                const Tolerances& tol = {});

    Kind kind() const { return kind_; }
    Eigen::Index dim() const;
    const Eigen::VectorXcd& vector() const;
    const Eigen::MatrixXcd& density_matrix() const;

  private:
    QuantumState() = default;
    Kind kind_ = Kind::pure;
    Eigen::VectorXcd vec_;
    Eigen::MatrixXcd rho_;
};

// Outcome of a positive-semidefiniteness test of a hermitian matrix.
struct PsdVerdict {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
    double determinant = 0.0;       // real part of det of the raw input
    double det_imag_residual = 0.0; // |imag part|, numerical contamination
    double tolerance_used = 0.0;    // absolute threshold after scaling
};

// Kronecker product; throws ModelTooLargeError past tol.max_composite_dim.
Operator tensor(const Operator& a, const Operator& b, const Tolerances& tol = {});

Operator commutator(const Operator& a, const Operator& b);

// Symmetrized product (ab + ba) / 2.
Operator sym_product(const Operator& a, const Operator& b);

Complex expectation(const Operator& op, const QuantumState& s);

// <p q> in the given state; p and q need not commute.
Complex product_expectation(const Operator& p, const Operator& q, const QuantumState& s);

// op - <op> I for hermitian op; rejects non-hermitian input.
Operator centered(const Operator& op, const QuantumState& s, const Tolerances& tol = {});

// Eigenvalue test of a near-hermitian matrix. The verdict threshold is
// tol.psd scaled by the spectral radius (1 if the matrix vanishes).
PsdVerdict psd_check(const Eigen::MatrixXcd& m, const Tolerances& tol = {});

// Conjugation u^dag op u; rejects non-unitary u.
Operator heisenberg_out(const Operator& u, const Operator& op, const Tolerances& tol = {});

// Stock operators used by the built-in models and tests.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

// Truncated Fock-space ladder and quadratures with [X, Y] = i c
// (up to the truncation edge).
Operator annihilation(Eigen::Index dim);
Operator quadrature_x(Eigen::Index dim, double comm_constant);
Operator quadrature_y(Eigen::Index dim, double comm_constant);

} // namespace ur
