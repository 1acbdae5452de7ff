#include "ur/gaussian.hpp"

#include <cmath>
#include <string>

namespace ur {

namespace {

std::string fmt_residual(double r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    return buf;
}

void check_coords(const Eigen::VectorXd& v, const CanonicalAlgebra& alg, const char* what) {
    if (v.size() != 2 * alg.modes)
        throw ShapeError(std::string(what) + " needs " + std::to_string(2 * alg.modes) +
                         " coordinates, got " + std::to_string(v.size()));
    if (!v.allFinite())
        throw ContractViolation(std::string(what) + " contains non-finite entries");
}

} // namespace

Eigen::MatrixXd CanonicalAlgebra::omega() const {
    if (modes < 1)
        throw ShapeError("algebra needs at least one mode");
    if (comm_constant <= 0.0)
        throw DomainError("commutation constant must be positive");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        w(2 * k, 2 * k + 1) = comm_constant;
        w(2 * k + 1, 2 * k) = -comm_constant;
    }
    return w;
}

GaussianMoments GaussianMoments::vacuum(const CanonicalAlgebra& alg) {
    GaussianMoments m;
    m.mean = Eigen::VectorXd::Zero(2 * alg.modes);
    m.cov = (alg.comm_constant / 2.0) *
            Eigen::MatrixXd::Identity(2 * alg.modes, 2 * alg.modes);
    return m;
}

LinearChannel::LinearChannel(Eigen::MatrixXd s, const CanonicalAlgebra& alg,
                             const Tolerances& tol)
    : s_(std::move(s)) {
    Eigen::Index n = 2 * alg.modes;
    if (s_.rows() != n || s_.cols() != n)
        throw ShapeError("channel matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!s_.allFinite())
        throw ContractViolation("channel matrix contains non-finite entries");
    Eigen::MatrixXd w = alg.omega();
    double scale = std::max(1.0, s_.cwiseAbs().maxCoeff());
    double res = (s_ * w * s_.transpose() - w).cwiseAbs().maxCoeff();
    if (res > tol.unitary * scale * scale)
        throw ContractViolation("channel does not preserve the commutation form, residual " +
                                fmt_residual(res));
}

std::complex<double> lin_commutator(const LinearObservable& u, const LinearObservable& v,
                                    const CanonicalAlgebra& alg) {
    check_coords(u.coeffs, alg, "observable");
    check_coords(v.coeffs, alg, "observable");
    return std::complex<double>(0.0, u.coeffs.dot(alg.omega() * v.coeffs));
}

double moment_expectation(const LinearObservable& u, const GaussianMoments& mom) {
    if (u.coeffs.size() != mom.mean.size())
        throw ShapeError("observable and moments have different coordinate counts");
    return u.coeffs.dot(mom.mean) + u.offset;
}

double moment_sym_cov(const LinearObservable& u, const LinearObservable& v,
                      const GaussianMoments& mom) {
    if (u.coeffs.size() != mom.mean.size() || v.coeffs.size() != mom.mean.size())
        throw ShapeError("observable and moments have different coordinate counts");
    if (mom.cov.rows() != mom.mean.size() || mom.cov.cols() != mom.mean.size())
        throw ShapeError("covariance block does not match the mean vector");
    return u.coeffs.dot(mom.cov * v.coeffs);
}

LinearObservable apply_channel(const LinearChannel& chan, const LinearObservable& u) {
    if (u.coeffs.size() != chan.matrix().rows())
        throw ShapeError("observable and channel have different coordinate counts");
    LinearObservable out;
    out.coeffs = chan.matrix().transpose() * u.coeffs;
    out.offset = u.offset;
    return out;
}

PsdVerdict physicality_check(const GaussianMoments& mom, const CanonicalAlgebra& alg,
                             const Tolerances& tol) {
    Eigen::Index n = 2 * alg.modes;
    if (mom.cov.rows() != n || mom.cov.cols() != n)
        throw ShapeError("covariance must be " + std::to_string(n) + "x" + std::to_string(n));
    double sym = (mom.cov - mom.cov.transpose()).cwiseAbs().maxCoeff();
    if (sym > tol.hermitian * std::max(1.0, mom.cov.cwiseAbs().maxCoeff()))
        throw ContractViolation("covariance is not symmetric, residual " + fmt_residual(sym));
    Eigen::MatrixXcd m = mom.cov.cast<std::complex<double>>() +
                         std::complex<double>(0.0, 0.5) *
                             alg.omega().cast<std::complex<double>>();
    return psd_check(m, tol);
}

GaussianMeasurementModel bae_model(double gain) {
    CanonicalAlgebra alg{1, 0.5};
    return bae_model(gain, GaussianMoments::vacuum(alg));
}

GaussianMeasurementModel bae_model(double gain, const GaussianMoments& object_moments) {
    if (!std::isfinite(gain) || gain == 0.0)
        throw DomainError("amplifier gain must be finite and non-zero");
    GaussianMeasurementModel m;
    m.object_modes = 1;
    m.probe_modes = 1;
    m.comm_constant = 0.5;

    auto obs = [](double c0, double c1, double c2, double c3) {
        LinearObservable o;
        o.coeffs = Eigen::Vector4d(c0, c1, c2, c3);
        return o;
    };
    m.a_obs = {obs(1, 0, 0, 0)};            // X_a
    m.b_obs = {obs(0, 1, 0, 0)};            // Y_a
    m.m_obs = {obs(0, 0, 1.0 / gain, 0)};   // meter X_b / gain

    Eigen::Matrix4d s;
    s << 1, 0, 0, 0,
         0, 1, 0, -gain,
         gain, 0, 1, 0,
         0, 0, 0, 1;
    m.channel = s;

    if (object_moments.mean.size() != 2 || object_moments.cov.rows() != 2 ||
        object_moments.cov.cols() != 2)
        throw ShapeError("object moments must describe a single mode");
    m.object_moments = object_moments;

    m.probe_moments.mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d pc;
    pc << 0.25, 0.5,
          0.5, 0.25;
    m.probe_moments.cov = pc;
    return m;
}

} // namespace ur
