#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ur/fuzz.hpp"
#include "ur/operators.hpp"

using Catch::Approx;
using namespace ur;

namespace {

const Complex I1(0.0, 1.0);

Eigen::MatrixXcd kron_oracle(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

} // namespace

TEST_CASE("operator construction validates shape and entries") {
    Eigen::MatrixXcd rect(2, 3);
    rect.setZero();
    REQUIRE_THROWS_AS(Operator(rect), ShapeError);
    REQUIRE_THROWS_AS(Operator(Eigen::MatrixXcd()), ShapeError);

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 1) = Complex(std::nan(""), 0.0);
    REQUIRE_THROWS_AS(Operator(bad), ContractViolation);
}

TEST_CASE("hermiticity and unitarity residuals") {
    REQUIRE(pauli_x().hermiticity_residual() == 0.0);
    REQUIRE(pauli_y().hermiticity_residual() == 0.0);
    REQUIRE(pauli_x().unitarity_residual() == 0.0);

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 1) = 1.0;
    REQUIRE(Operator(m).hermiticity_residual() == Approx(1.0));

    Eigen::MatrixXcd s = 2.0 * Eigen::MatrixXcd::Identity(2, 2);
    REQUIRE(Operator(s).unitarity_residual() == Approx(3.0));
}

TEST_CASE("tensor product matches the entrywise Kronecker oracle") {
    Eigen::MatrixXcd a(2, 2), b(3, 3);
    a << Complex(1, 2), Complex(0, -1), Complex(3, 0), Complex(-2, 1);
    b.setZero();
    b(0, 1) = Complex(1, 1);
    b(1, 2) = Complex(0, -2);
    b(2, 0) = Complex(4, 0);
    b(1, 1) = Complex(-1, 3);

    Operator t = tensor(Operator(a), Operator(b));
    REQUIRE(t.dim() == 6);
    REQUIRE((t.entries() - kron_oracle(a, b)).cwiseAbs().maxCoeff() == 0.0);

    // left factor varies slowest
    Operator za = tensor(pauli_z(), Operator::identity(2));
    REQUIRE(za.entries()(0, 0) == Complex(1, 0));
    REQUIRE(za.entries()(2, 2) == Complex(-1, 0));
}

TEST_CASE("tensor refuses composite dimensions past the cap") {
    Tolerances tol;
    tol.max_composite_dim = 8;
    REQUIRE_THROWS_AS(tensor(Operator::identity(3), Operator::identity(3), tol),
                      ModelTooLargeError);
    REQUIRE_NOTHROW(tensor(Operator::identity(2), Operator::identity(4), tol));
}

TEST_CASE("commutator and symmetrized product against direct products") {
    Operator x = pauli_x(), y = pauli_y(), z = pauli_z();

    // [x, y] = 2i z
    REQUIRE((commutator(x, y).entries() - 2.0 * I1 * z.entries()).cwiseAbs().maxCoeff() ==
            Approx(0.0).margin(1e-15));

    Eigen::MatrixXcd a = random_hermitian(4, 11);
    Eigen::MatrixXcd b = random_hermitian(4, 12);
    Eigen::MatrixXcd comm = a * b - b * a;
    Eigen::MatrixXcd sym = 0.5 * (a * b + b * a);
    REQUIRE((commutator(Operator(a), Operator(b)).entries() - comm).cwiseAbs().maxCoeff() ==
            Approx(0.0).margin(1e-14));
    REQUIRE((sym_product(Operator(a), Operator(b)).entries() - sym).cwiseAbs().maxCoeff() ==
            Approx(0.0).margin(1e-14));
    REQUIRE(sym_product(Operator(a), Operator(b)).hermiticity_residual() ==
            Approx(0.0).margin(1e-14));
}

TEST_CASE("expectation values from spectral data") {
    Eigen::VectorXcd up(2), plus(2);
    up << 1.0, 0.0;
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

    QuantumState s_up = QuantumState::pure(up);
    QuantumState s_plus = QuantumState::pure(plus);
    REQUIRE(expectation(pauli_z(), s_up).real() == Approx(1.0));
    REQUIRE(expectation(pauli_z(), s_plus).real() == Approx(0.0).margin(1e-15));
    REQUIRE(expectation(pauli_x(), s_plus).real() == Approx(1.0));

    // mixed state: equal mixture has vanishing Bloch vector
    QuantumState mixed = QuantumState::density(0.5 * Eigen::MatrixXcd::Identity(2, 2));
    REQUIRE(expectation(pauli_x(), mixed).real() == Approx(0.0).margin(1e-15));
    REQUIRE(expectation(pauli_z(), mixed).real() == Approx(0.0).margin(1e-15));
}

TEST_CASE("product expectation agrees between pure and density forms") {
    Eigen::VectorXcd v = random_unit_vector(5, 21);
    Eigen::MatrixXcd p = random_hermitian(5, 22);
    Eigen::MatrixXcd q = random_hermitian(5, 23);

    QuantumState pure = QuantumState::pure(v);
    QuantumState rho = QuantumState::density(v * v.adjoint());

    Complex via_pure = product_expectation(Operator(p), Operator(q), pure);
    Complex via_rho = product_expectation(Operator(p), Operator(q), rho);
    Complex direct = (v.adjoint() * p * q * v)(0, 0);
    REQUIRE(std::abs(via_pure - direct) < 1e-13);
    REQUIRE(std::abs(via_rho - direct) < 1e-13);
}

TEST_CASE("centered subtracts the mean and rejects non-hermitian input") {
    Eigen::VectorXcd up(2);
    up << 1.0, 0.0;
    QuantumState s = QuantumState::pure(up);
    Operator c = centered(pauli_z(), s);
    REQUIRE(std::abs(expectation(c, s)) < 1e-15);
    REQUIRE((c.entries() - (pauli_z().entries() - Eigen::MatrixXcd::Identity(2, 2)))
                .cwiseAbs()
                .maxCoeff() < 1e-15);

    Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(2, 2);
    nh(0, 1) = 1.0;
    REQUIRE_THROWS_AS(centered(Operator(nh), s), ContractViolation);
}

TEST_CASE("state validation") {
    Eigen::VectorXcd bad(2);
    bad << 1.0, 1.0; // norm sqrt(2)
    REQUIRE_THROWS_AS(QuantumState::pure(bad), ContractViolation);

    Eigen::MatrixXcd neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5; // trace 1 but not psd
    REQUIRE_THROWS_AS(QuantumState::density(neg), ContractViolation);

    Eigen::MatrixXcd tr2 = Eigen::MatrixXcd::Identity(2, 2);
    REQUIRE_THROWS_AS(QuantumState::density(tr2), ContractViolation);

    Eigen::VectorXcd up(2);
    up << 1.0, 0.0;
    QuantumState s = QuantumState::pure(up);
    REQUIRE_THROWS_AS(s.density_matrix(), Error);
}

TEST_CASE("product state stacks amplitudes with the left factor slowest") {
    Eigen::VectorXcd a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    QuantumState ab = QuantumState::product(QuantumState::pure(a), QuantumState::pure(b));
    REQUIRE(ab.dim() == 4);
    REQUIRE(std::abs(ab.vector()(1) - Complex(1, 0)) < 1e-15); // |0>|1> -> index 1

    // mixed x pure falls back to the density form
    QuantumState mixed = QuantumState::density(0.5 * Eigen::MatrixXcd::Identity(2, 2));
    QuantumState mp = QuantumState::product(mixed, QuantumState::pure(b));
    REQUIRE(mp.kind() == QuantumState::Kind::density);
    REQUIRE(mp.density_matrix().trace().real() == Approx(1.0));
}

TEST_CASE("psd check certifies the golden indefinite matrix") {
    // 2x2 hermitian with det -1/4 and min eigenvalue (1 - sqrt 5)/4
    Eigen::MatrixXcd m(2, 2);
    m(0, 0) = 0.25;
    m(1, 1) = 0.25;
    m(0, 1) = Complex(-0.5, 0.25);
    m(1, 0) = Complex(-0.5, -0.25);

    PsdVerdict v = psd_check(m);
    REQUIRE_FALSE(v.is_psd);
    REQUIRE(v.min_eigenvalue == Approx((1.0 - std::sqrt(5.0)) / 4.0).margin(1e-14));
    REQUIRE(v.determinant == Approx(-0.25).margin(1e-14));
    REQUIRE(v.det_imag_residual < 1e-14);

    PsdVerdict id = psd_check(Eigen::MatrixXcd::Identity(3, 3));
    REQUIRE(id.is_psd);
    REQUIRE(id.min_eigenvalue == Approx(1.0));

    PsdVerdict zero = psd_check(Eigen::MatrixXcd::Zero(2, 2));
    REQUIRE(zero.is_psd);
    REQUIRE(zero.tolerance_used == Approx(1e-10));

    Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(2, 2);
    nh(0, 1) = 1.0;
    REQUIRE_THROWS_AS(psd_check(nh), ContractViolation);
}

TEST_CASE("heisenberg evolution conjugates and demands unitarity") {
    // controlled flip: |c>|t> -> |c>|t xor c>
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    u(0, 0) = u(1, 1) = 1.0;
    u(2, 3) = u(3, 2) = 1.0;
    Operator cnot(u);

    Operator zz = tensor(Operator::identity(2), pauli_z());
    Operator out = heisenberg_out(cnot, zz);
    Eigen::MatrixXcd oracle = u.adjoint() * zz.entries() * u;
    REQUIRE((out.entries() - oracle).cwiseAbs().maxCoeff() < 1e-15);
    // probe z picks up the control: u^dag (I x z) u = z x z
    REQUIRE((out.entries() - tensor(pauli_z(), pauli_z()).entries()).cwiseAbs().maxCoeff() <
            1e-15);

    REQUIRE_THROWS_AS(heisenberg_out(Operator(2.0 * Eigen::MatrixXcd::Identity(2, 2)), pauli_x()),
                      ContractViolation);
}

TEST_CASE("ladder and quadrature operators") {
    Operator a = annihilation(4);
    REQUIRE(a.entries()(0, 1) == Complex(1.0, 0.0));
    REQUIRE(a.entries()(1, 2).real() == Approx(std::sqrt(2.0)));
    REQUIRE(a.entries()(2, 3).real() == Approx(std::sqrt(3.0)));

    const double c = 0.5;
    const Eigen::Index d = 12;
    Operator x = quadrature_x(d, c);
    Operator y = quadrature_y(d, c);
    REQUIRE(x.hermiticity_residual() < 1e-15);
    REQUIRE(y.hermiticity_residual() < 1e-15);

    // [x, y] = i c away from the truncation corner
    Eigen::MatrixXcd comm = commutator(x, y).entries();
    Eigen::MatrixXcd want = I1 * c * Eigen::MatrixXcd::Identity(d, d);
    REQUIRE((comm - want).topLeftCorner(d - 1, d - 1).cwiseAbs().maxCoeff() < 1e-14);
}
