#include "ur/builtin_models.hpp"

#include <cmath>

namespace ur {

namespace {

QuantumState plus_i_state() {
    Eigen::Vector2cd v(Complex(1.0 / std::sqrt(2.0), 0.0), Complex(0.0, 1.0 / std::sqrt(2.0)));
    return QuantumState::pure(v);
}

QuantumState ground_state(Eigen::Index dim) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(0) = 1.0;
    return QuantumState::pure(v);
}

} // namespace

FiniteMeasurementModel make_identity_model() {
    return FiniteMeasurementModel{.object_state = plus_i_state(),
                                  .probe_state = ground_state(2),
                                  .a_obs = {pauli_z()},
                                  .b_obs = {pauli_x()},
                                  .m_obs = {pauli_z()},
                                  .interaction = Operator::identity(4)};
}

FiniteMeasurementModel make_cnot_model() {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    u(2, 3) = 1.0;
    u(3, 2) = 1.0;
    return FiniteMeasurementModel{.object_state = plus_i_state(),
                                  .probe_state = ground_state(2),
                                  .a_obs = {pauli_z()},
                                  .b_obs = {pauli_x()},
                                  .m_obs = {pauli_z()},
                                  .interaction = Operator(u)};
}

FiniteMeasurementModel make_truncated_bae_model(Eigen::Index per_mode_dim, double gain,
                                                const Tolerances& tol) {
    if (!std::isfinite(gain) || gain == 0.0)
        throw DomainError("amplifier gain must be finite and non-zero");
    if (per_mode_dim < 2)
        throw DomainError("oscillator truncation needs dimension >= 2");
    Operator x = quadrature_x(per_mode_dim, 0.5);
    Operator y = quadrature_y(per_mode_dim, 0.5);

    // U = exp(-2 i gain X (x) Y) produces the amplifier flow on the
    // quadratures away from the truncation edge.
    Operator h = tensor(x, y, tol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (h.entries() + h.entries().adjoint()));
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0.0, -2.0 * gain * es.eigenvalues()(i)));
    Eigen::MatrixXcd u =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    return FiniteMeasurementModel{.object_state = ground_state(per_mode_dim),
                                  .probe_state = ground_state(per_mode_dim),
                                  .a_obs = {x},
                                  .b_obs = {y},
                                  .m_obs = {Operator((1.0 / gain) * x.entries())},
                                  .interaction = Operator(std::move(u))};
}

} // namespace ur
