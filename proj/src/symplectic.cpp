#include "ur/symplectic.hpp"

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace ur {

namespace {

std::string fmt_residual(double r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    return buf;
}

} // namespace

Eigen::MatrixXd symplectic_form(int n) {
    if (n < 1)
        throw ShapeError("commutation form needs n >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return j;
}

SymplecticCheck is_symplectic(const Eigen::MatrixXd& s, double tol) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() == 0)
        throw ShapeError("symplectic test needs a square even-dimensional matrix");
    int n = int(s.rows() / 2);
    Eigen::MatrixXd j = symplectic_form(n);
    SymplecticCheck c;
    c.residual = (s * j * s.transpose() - j).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    c.ok = c.residual <= tol * scale * scale;
    return c;
}

Eigen::MatrixXd symplectic_exp(const Eigen::MatrixXd& h_sym) {
    if (h_sym.rows() != h_sym.cols() || h_sym.rows() % 2 != 0 || h_sym.rows() == 0)
        throw ShapeError("generator must be square and even-dimensional");
    double sym = (h_sym - h_sym.transpose()).cwiseAbs().maxCoeff();
    if (sym > 1e-12 * std::max(1.0, h_sym.cwiseAbs().maxCoeff()))
        throw ContractViolation("generator is not symmetric, residual " + fmt_residual(sym));
    int n = int(h_sym.rows() / 2);
    Eigen::MatrixXd a = symplectic_form(n) * h_sym;
    return a.exp();
}

Eigen::MatrixXd random_symplectic(int n, std::uint64_t seed) {
    if (n < 1)
        throw ShapeError("random symplectic map needs n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd h(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) {
            double v = u(rng) / (2.0 * n);
            h(i, j) = v;
            h(j, i) = v;
        }
    return symplectic_exp(h);
}

TransformedND transform_nd(const Eigen::MatrixXd& s, const Eigen::MatrixXd& k,
                           const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& g) {
    if (s.rows() != s.cols() || s.rows() != k.rows() || k.rows() != k.cols() ||
        gamma.rows() != k.rows() || gamma.cols() != k.cols() || g.rows() != k.rows() ||
        g.cols() != k.cols())
        throw ShapeError("congruence needs equally sized square matrices");
    TransformedND t;
    t.k = s * k * s.transpose();
    t.gamma = s * gamma * s.transpose();
    t.g = s * g * s.transpose();
    return t;
}

Eigen::Matrix2d rotation2(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
    return r;
}

RotatedOzawa rotated_ozawa_experiment(const MeasurementModel& model, double angle,
                                      const Tolerances& tol) {
    UncertaintyReport rep = analyze(model, tol);
    if (rep.n != 1)
        throw ContractViolation("frame rotation needs a single measured pair, model has " +
                                std::to_string(rep.n));
    double gamma_res = rep.gamma.cwiseAbs().maxCoeff();
    double scale = std::max({1.0, rep.k_matrix.cwiseAbs().maxCoeff(),
                             rep.g_exp.cwiseAbs().maxCoeff()});
    if (gamma_res > tol.psd * scale)
        throw ContractViolation(
            "frame rotation needs a vanishing cross commutator matrix, residual " +
            fmt_residual(gamma_res));

    RotatedOzawa out;
    out.angle = angle;
    out.gamma_scale = rep.g_exp(0, 1);
    out.k_before = rep.k_matrix;
    Eigen::Matrix2d r = rotation2(angle);
    out.k_after = r * out.k_before * r.transpose();
    Eigen::Matrix2d g_after = r * rep.g_exp * r.transpose();

    out.eps_sq_before = out.k_before(0, 0);
    out.eta_sq_before = out.k_before(1, 1);
    out.cross_before = out.k_before(0, 1);
    out.eps_sq_after = out.k_after(0, 0);
    out.eta_sq_after = out.k_after(1, 1);
    out.cross_after = out.k_after(0, 1);

    auto make_check = [&](double lhs, double rhs) {
        InequalityCheck c;
        c.lhs = lhs;
        c.rhs = rhs;
        c.holds = lhs >= rhs - tol.psd * std::max({1.0, std::abs(lhs), std::abs(rhs)});
        return c;
    };
    double eps = std::sqrt(std::max(0.0, out.eps_sq_before));
    double eta = std::sqrt(std::max(0.0, out.eta_sq_before));
    out.scalar_before = make_check(eps * eta, 0.5 * std::abs(out.gamma_scale));
    out.rotated_scalar =
        make_check(out.eps_sq_after + out.eta_sq_after,
                   std::sqrt(1.0 + 4.0 * out.cross_after * out.cross_after));

    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
    out.matrix_before = matrix_oup(out.k_before, zero, rep.g_exp, tol).verdict;
    out.matrix_after = matrix_oup(out.k_after, zero, g_after, tol).verdict;
    return out;
}

} // namespace ur
