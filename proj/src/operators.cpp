#include "ur/operators.hpp"

#include <cmath>
#include <string>

namespace ur {

namespace {

std::string fmt_residual(double r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    return buf;
}

} // namespace

Operator::Operator(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw ShapeError("operator matrix must be square, got " + std::to_string(entries_.rows()) +
                         "x" + std::to_string(entries_.cols()));
    if (entries_.rows() == 0)
        throw ShapeError("operator matrix must be non-empty");
    if (!entries_.allFinite())
        throw ContractViolation("operator matrix contains non-finite entries");
}

double Operator::hermiticity_residual() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double Operator::unitarity_residual() const {
    Eigen::MatrixXcd g = entries_ * entries_.adjoint();
    g -= Eigen::MatrixXcd::Identity(dim(), dim());
    return g.cwiseAbs().maxCoeff();
}

Operator Operator::identity(Eigen::Index dim) {
    return Operator(Eigen::MatrixXcd::Identity(dim, dim));
}

Operator Operator::zero(Eigen::Index dim) {
    return Operator(Eigen::MatrixXcd::Zero(dim, dim));
}

Operator operator+(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw ShapeError("operator sum needs equal dimensions");
    return Operator(a.entries_ + b.entries_);
}

Operator operator-(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw ShapeError("operator difference needs equal dimensions");
    return Operator(a.entries_ - b.entries_);
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw ShapeError("operator product needs equal dimensions");
    return Operator(a.entries_ * b.entries_);
}

Operator operator*(Complex s, const Operator& a) {
    return Operator(s * a.entries_);
}

QuantumState QuantumState::pure(Eigen::VectorXcd v, const Tolerances& tol) {
    if (v.size() == 0)
        throw ShapeError("state vector must be non-empty");
    if (!v.allFinite())
        throw ContractViolation("state vector contains non-finite entries");
    double n = v.norm();
    if (std::abs(n - 1.0) > tol.norm)
        throw ContractViolation("state vector is not normalized, |norm - 1| = " +
                                fmt_residual(std::abs(n - 1.0)));
    QuantumState s;
    s.kind_ = Kind::pure;
    s.vec_ = std::move(v);
    return s;
}

QuantumState QuantumState::density(Eigen::MatrixXcd rho, const Tolerances& tol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0)
        throw ShapeError("density matrix must be square and non-empty");
    if (!rho.allFinite())
        throw ContractViolation("density matrix contains non-finite entries");
    double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermitian)
        throw ContractViolation("density matrix is not hermitian, residual " + fmt_residual(herm));
    double tr_err = std::abs(rho.trace() - Complex(1.0));
    if (tr_err > tol.norm)
        throw ContractViolation("density matrix trace differs from 1 by " + fmt_residual(tr_err));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol.psd)
        throw ContractViolation("density matrix has negative eigenvalue " + fmt_residual(min_eig));
    QuantumState s;
    s.kind_ = Kind::density;
    s.rho_ = std::move(rho);
    return s;
}

QuantumState QuantumState::product(const QuantumState& a, const QuantumState& b,
                                   const Tolerances& tol) {
    Eigen::Index da = a.dim(), db = b.dim();
    if (da * db > tol.max_composite_dim)
        throw ModelTooLargeError("composite dimension " + std::to_string(da * db) +
                                 " exceeds limit " + std::to_string(tol.max_composite_dim));
    if (a.kind_ == Kind::pure && b.kind_ == Kind::pure) {
        Eigen::VectorXcd v(da * db);
        for (Eigen::Index i = 0; i < da; ++i)
            for (Eigen::Index k = 0; k < db; ++k)
                v(i * db + k) = a.vec_(i) * b.vec_(k);
        Tolerances loose = tol;
        loose.norm = 1e-8; // product of two unit vectors, only rounding drift
        return pure(std::move(v), loose);
    }
    auto as_density = [](const QuantumState& s) -> Eigen::MatrixXcd {
        if (s.kind_ == Kind::density)
            return s.rho_;
        return s.vec_ * s.vec_.adjoint();
    };
    Eigen::MatrixXcd ra = as_density(a), rb = as_density(b);
    Eigen::MatrixXcd r(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            r.block(i * db, j * db, db, db) = ra(i, j) * rb;
    Tolerances loose = tol;
    loose.norm = 1e-8;
    loose.psd = 1e-8;
    return density(std::move(r), loose);
}

Eigen::Index QuantumState::dim() const {
    return kind_ == Kind::pure ? vec_.size() : rho_.rows();
}

const Eigen::VectorXcd& QuantumState::vector() const {
    if (kind_ != Kind::pure)
        throw ContractViolation("state is not pure");
    return vec_;
}

const Eigen::MatrixXcd& QuantumState::density_matrix() const {
    if (kind_ != Kind::density)
        throw ContractViolation("state is not a density matrix");
    return rho_;
}

Operator tensor(const Operator& a, const Operator& b, const Tolerances& tol) {
    Eigen::Index da = a.dim(), db = b.dim();
    if (da * db > tol.max_composite_dim)
        throw ModelTooLargeError("composite dimension " + std::to_string(da * db) +
                                 " exceeds limit " + std::to_string(tol.max_composite_dim));
    Eigen::MatrixXcd out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.entries()(i, j) * b.entries();
    return Operator(std::move(out));
}

Operator commutator(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw ShapeError("commutator needs equal dimensions");
    return Operator(a.entries() * b.entries() - b.entries() * a.entries());
}

Operator sym_product(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim())
        throw ShapeError("symmetrized product needs equal dimensions");
    return Operator(0.5 * (a.entries() * b.entries() + b.entries() * a.entries()));
}

Complex expectation(const Operator& op, const QuantumState& s) {
    if (op.dim() != s.dim())
        throw ShapeError("operator and state dimensions differ");
    if (s.kind() == QuantumState::Kind::pure)
        return s.vector().dot(op.entries() * s.vector());
    return (op.entries() * s.density_matrix()).trace();
}

Complex product_expectation(const Operator& p, const Operator& q, const QuantumState& s) {
    if (p.dim() != q.dim() || p.dim() != s.dim())
        throw ShapeError("operator and state dimensions differ");
    if (s.kind() == QuantumState::Kind::pure) {
        // <psi| p q |psi> via two matvecs; avoids the full product matrix.
        Eigen::VectorXcd lhs = p.entries().adjoint() * s.vector();
        Eigen::VectorXcd rhs = q.entries() * s.vector();
        return lhs.dot(rhs);
    }
    return (p.entries() * q.entries() * s.density_matrix()).trace();
}

Operator centered(const Operator& op, const QuantumState& s, const Tolerances& tol) {
    double scale = std::max(1.0, op.entries().cwiseAbs().maxCoeff());
    double herm = op.hermiticity_residual();
    if (herm > tol.hermitian * scale)
        throw ContractViolation("centered() needs a hermitian operator, residual " +
                                fmt_residual(herm));
    Complex mean = expectation(op, s);
    return Operator(op.entries() -
                    mean.real() * Eigen::MatrixXcd::Identity(op.dim(), op.dim()));
}

PsdVerdict psd_check(const Eigen::MatrixXcd& m, const Tolerances& tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ShapeError("psd check needs a square non-empty matrix");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermitian * scale)
        throw ContractViolation("psd check input is not hermitian, residual " +
                                fmt_residual(herm));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    PsdVerdict v;
    v.min_eigenvalue = es.eigenvalues().minCoeff();
    double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
    if (spectral == 0.0)
        spectral = 1.0;
    v.tolerance_used = tol.psd * spectral;
    v.is_psd = v.min_eigenvalue >= -v.tolerance_used;
    Complex det = m.determinant();
    v.determinant = det.real();
    v.det_imag_residual = std::abs(det.imag());
    return v;
}

Operator heisenberg_out(const Operator& u, const Operator& op, const Tolerances& tol) {
    if (u.dim() != op.dim())
        throw ShapeError("conjugation needs equal dimensions");
    double uni = u.unitarity_residual();
    if (uni > tol.unitary)
        throw ContractViolation("heisenberg_out() needs a unitary map, residual " +
                                fmt_residual(uni));
    return Operator(u.entries().adjoint() * op.entries() * u.entries());
}

Operator pauli_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(m);
}

Operator pauli_y() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator(m);
}

Operator pauli_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(m);
}

Operator annihilation(Eigen::Index dim) {
    if (dim < 2)
        throw ShapeError("ladder operator needs dimension >= 2");
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n)
        a(n - 1, n) = std::sqrt(double(n));
    return Operator(std::move(a));
}

Operator quadrature_x(Eigen::Index dim, double comm_constant) {
    if (comm_constant <= 0.0)
        throw DomainError("commutation constant must be positive");
    Operator a = annihilation(dim);
    double s = std::sqrt(comm_constant / 2.0);
    return Operator(s * (a.entries() + a.entries().adjoint()));
}

Operator quadrature_y(Eigen::Index dim, double comm_constant) {
    if (comm_constant <= 0.0)
        throw DomainError("commutation constant must be positive");
    Operator a = annihilation(dim);
    double s = std::sqrt(comm_constant / 2.0);
    return Operator(s * (a.entries() - a.entries().adjoint()) / Complex(0, 1));
}

} // namespace ur
