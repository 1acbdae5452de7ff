#include "ur/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ur {

namespace {

std::string fmt_residual(double r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    return buf;
}

double maxabs(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double maxabs_real(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

InequalityCheck make_check(double lhs, double rhs, double tol_psd) {
    InequalityCheck c;
    c.lhs = lhs;
    c.rhs = rhs;
    double slack = tol_psd * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    c.holds = lhs >= rhs - slack;
    return c;
}

double clamped_sqrt(double x) {
    return x > 0.0 ? std::sqrt(x) : 0.0;
}

void check_observable_family(const std::vector<Operator>& ops, Eigen::Index dim,
                             const char* name, const Tolerances& tol) {
    for (size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].dim() != dim)
            throw ShapeError(std::string(name) + "[" + std::to_string(i) + "] has dimension " +
                             std::to_string(ops[i].dim()) + ", subsystem has " +
                             std::to_string(dim));
        double scale = std::max(1.0, ops[i].entries().cwiseAbs().maxCoeff());
        double herm = ops[i].hermiticity_residual();
        if (herm > tol.hermitian * scale)
            throw ContractViolation(std::string(name) + "[" + std::to_string(i) +
                                    "] is not hermitian, residual " + fmt_residual(herm));
    }
    for (size_t i = 0; i < ops.size(); ++i) {
        for (size_t j = i + 1; j < ops.size(); ++j) {
            double scale = std::max(1.0, ops[i].entries().cwiseAbs().maxCoeff() *
                                             ops[j].entries().cwiseAbs().maxCoeff());
            double res = maxabs(commutator(ops[i], ops[j]).entries());
            if (res > tol.hermitian * scale)
                throw ContractViolation(std::string(name) + "[" + std::to_string(i) + "] and " +
                                        name + "[" + std::to_string(j) +
                                        "] do not commute, residual " + fmt_residual(res));
        }
    }
}

// Pairwise product expectations among the collective in-vector and the
// noise-disturbance vector. All operators involved are hermitian, so for
// pure states <PQ> reduces to an inner product of applied vectors.
struct PairTables {
    Eigen::MatrixXcd zz, zk, kz, kk; // (2n)^2, e.g. zk(a,b) = <Z_a K_b>
    Eigen::VectorXcd zmean, kmean;
};

PairTables finite_tables(const FiniteNDSystem& sys, const QuantumState& state) {
    int d = 2 * sys.n;
    PairTables t;
    t.zz.resize(d, d);
    t.zk.resize(d, d);
    t.kz.resize(d, d);
    t.kk.resize(d, d);
    t.zmean.resize(d);
    t.kmean.resize(d);
    if (state.kind() == QuantumState::Kind::pure) {
        const Eigen::VectorXcd& psi = state.vector();
        std::vector<Eigen::VectorXcd> za(d), ka(d);
        for (int a = 0; a < d; ++a) {
            za[a] = sys.z_in[a].entries() * psi;
            ka[a] = sys.k_vec[a].entries() * psi;
            t.zmean(a) = psi.dot(za[a]);
            t.kmean(a) = psi.dot(ka[a]);
        }
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                t.zz(a, b) = za[a].dot(za[b]);
                t.zk(a, b) = za[a].dot(ka[b]);
                t.kz(a, b) = ka[a].dot(za[b]);
                t.kk(a, b) = ka[a].dot(ka[b]);
            }
        }
        return t;
    }
    for (int a = 0; a < d; ++a) {
        t.zmean(a) = expectation(sys.z_in[a], state);
        t.kmean(a) = expectation(sys.k_vec[a], state);
    }
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            t.zz(a, b) = product_expectation(sys.z_in[a], sys.z_in[b], state);
            t.zk(a, b) = product_expectation(sys.z_in[a], sys.k_vec[b], state);
            t.kz(a, b) = product_expectation(sys.k_vec[a], sys.z_in[b], state);
            t.kk(a, b) = product_expectation(sys.k_vec[a], sys.k_vec[b], state);
        }
    }
    return t;
}

// Complex commutator-expectation matrices entering the closure identity.
struct CommMatrices {
    Eigen::MatrixXcd eg;    // <[Z_a, Z_b]>
    Eigen::MatrixXcd cross; // <[Z_a, K_b] + [K_a, Z_b]>
    Eigen::MatrixXcd kk;    // <[K_a, K_b]>
};

CommMatrices comm_from_tables(const PairTables& t) {
    CommMatrices c;
    c.eg = t.zz - t.zz.transpose();
    c.cross = (t.zk - t.kz.transpose()) + (t.kz - t.zk.transpose());
    c.kk = t.kk - t.kk.transpose();
    return c;
}

struct RealMatrix {
    Eigen::MatrixXd value;
    double imag_residual = 0.0;
};

RealMatrix take_real(const Eigen::MatrixXcd& m, const Tolerances& tol, const char* what) {
    RealMatrix r;
    r.value = m.real();
    r.imag_residual = m.imag().cwiseAbs().maxCoeff();
    double scale = std::max(1.0, maxabs_real(r.value));
    if (r.imag_residual > tol.hermitian * scale)
        throw ContaminationError(std::string(what) + " has imaginary residual " +
                                 fmt_residual(r.imag_residual));
    return r;
}

Eigen::MatrixXcd sym_cov_complex(const Eigen::MatrixXcd& pp, const Eigen::VectorXcd& mean) {
    Eigen::MatrixXcd s = 0.5 * (pp + pp.transpose());
    s -= mean * mean.transpose();
    return s;
}

struct AnalysisPieces {
    std::string backend;
    int n = 0;
    RealMatrix k, gamma, g, sigma;
    Diagnostics diag;
    std::optional<PsdVerdict> object_physicality;
    std::optional<PsdVerdict> probe_physicality;
};

UncertaintyReport assemble_report(AnalysisPieces&& p, const Tolerances& tol) {
    UncertaintyReport r;
    r.backend = std::move(p.backend);
    r.n = p.n;
    r.k_matrix = std::move(p.k.value);
    r.gamma = std::move(p.gamma.value);
    r.g_exp = std::move(p.g.value);
    r.sigma_in = std::move(p.sigma.value);
    r.diagnostics = p.diag;
    r.diagnostics.k_imag_residual = p.k.imag_residual;
    r.diagnostics.gamma_imag_residual = p.gamma.imag_residual;
    r.diagnostics.g_imag_residual = p.g.imag_residual;
    r.diagnostics.k_symmetry_residual =
        maxabs_real(r.k_matrix - r.k_matrix.transpose());
    r.diagnostics.gamma_skew_residual =
        maxabs_real(r.gamma + r.gamma.transpose());
    r.diagnostics.g_skew_residual = maxabs_real(r.g_exp + r.g_exp.transpose());

    MatrixOupResult oup = matrix_oup(r.k_matrix, r.gamma, r.g_exp, tol);
    r.oup_matrix = std::move(oup.matrix);
    r.matrix_oup = oup.verdict;

    int n = r.n;
    r.epsilon.resize(n);
    r.eta.resize(n);
    r.sigma_a.resize(n);
    r.sigma_b.resize(n);
    for (int i = 0; i < n; ++i) {
        r.epsilon[i] = clamped_sqrt(r.k_matrix(i, i));
        r.eta[i] = clamped_sqrt(r.k_matrix(n + i, n + i));
        r.sigma_a[i] = clamped_sqrt(r.sigma_in(i, i));
        r.sigma_b[i] = clamped_sqrt(r.sigma_in(n + i, n + i));
    }

    bool pairs_hold = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int b = n + j;
            PairReport pr;
            pr.i = i;
            pr.j = j;
            double c = 0.5 * std::abs(r.g_exp(i, b));
            double eps = r.epsilon[i], eta = r.eta[j];
            double sa = r.sigma_a[i], sb = r.sigma_b[j];
            pr.ozawa = make_check(eps * eta + eps * sb + sa * eta, c, tol.psd);
            pr.heisenberg_nd = make_check(eps * eta, c, tol.psd);
            pr.robertson = make_check(sa * sb, c, tol.psd);

            DetChain& dc = pr.det_chain;
            dc.variance_product = r.k_matrix(i, i) * r.k_matrix(b, b);
            dc.cross_sq = r.k_matrix(i, b) * r.k_matrix(i, b);
            double comm = r.gamma(i, b) + r.g_exp(i, b);
            dc.comm_sq = 0.25 * comm * comm;
            InequalityCheck det =
                make_check(dc.variance_product, dc.cross_sq + dc.comm_sq, tol.psd);
            dc.det_bound_holds = det.holds;
            dc.gap_bound = make_check(
                eps * eta, 0.5 * std::abs(std::abs(r.gamma(i, b)) - std::abs(r.g_exp(i, b))),
                tol.psd);
            dc.difference_bound = make_check(
                eps * eta, 0.5 * std::abs(r.g_exp(i, b)) - 0.5 * std::abs(r.gamma(i, b)),
                tol.psd);
            pairs_hold = pairs_hold && pr.ozawa.holds && pr.robertson.holds &&
                         dc.det_bound_holds && dc.gap_bound.holds && dc.difference_bound.holds;
            r.pairs.push_back(std::move(pr));
        }
    }

    Eigen::MatrixXcd rsup_m = r.sigma_in.cast<Complex>() +
                              Complex(0.0, 0.5) * r.g_exp.cast<Complex>();
    r.rsup = psd_check(rsup_m, tol);

    double gamma_scale = std::max({1.0, maxabs_real(r.k_matrix), maxabs_real(r.g_exp)});
    r.independent_intervention = maxabs_real(r.gamma) <= tol.psd * gamma_scale;

    r.object_physicality = p.object_physicality;
    r.probe_physicality = p.probe_physicality;

    r.all_hold = r.matrix_oup.is_psd && r.rsup.is_psd && pairs_hold;
    return r;
}

std::vector<Eigen::VectorXcd> unit_axes(int d) {
    std::vector<Eigen::VectorXcd> out;
    for (int a = 0; a < d; ++a) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
        e(a) = 1.0;
        out.push_back(std::move(e));
    }
    return out;
}

IdentityReport identity_from_matrices(const CommMatrices& cm, const Eigen::MatrixXcd& form,
                                      const std::vector<Eigen::VectorXcd>& lambdas,
                                      const Tolerances& tol) {
    Eigen::MatrixXcd closure = cm.eg + cm.cross + cm.kk;
    std::vector<Eigen::VectorXcd> axes;
    if (lambdas.empty())
        axes = unit_axes(int(closure.rows()));
    const std::vector<Eigen::VectorXcd>& probes = lambdas.empty() ? axes : lambdas;
    IdentityReport rep;
    bool first = true;
    for (const auto& lam : probes) {
        if (lam.size() != closure.rows())
            throw ShapeError("probe vector length " + std::to_string(lam.size()) +
                             " does not match the collective dimension " +
                             std::to_string(closure.rows()));
        IdentityProbe p;
        p.identity_residual = std::abs(lam.dot(closure * lam));
        Complex f = lam.dot(form * lam);
        p.form_value = f.real();
        p.form_imag_residual = std::abs(f.imag());
        rep.max_identity_residual = std::max(rep.max_identity_residual, p.identity_residual);
        rep.min_form_value = first ? p.form_value : std::min(rep.min_form_value, p.form_value);
        first = false;
        rep.probes.push_back(p);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (form + form.adjoint()));
    double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
    if (spectral == 0.0)
        spectral = 1.0;
    rep.matrix_psd = es.eigenvalues().minCoeff() >= -tol.psd * spectral;
    if (!rep.matrix_psd) {
        Eigen::Index worst;
        es.eigenvalues().minCoeff(&worst);
        rep.refuting_lambda = es.eigenvectors().col(worst);
        rep.refuting_form_value = es.eigenvalues()(worst);
    }
    return rep;
}

} // namespace

FiniteNDSystem build_nd_system(const FiniteMeasurementModel& model, const Tolerances& tol) {
    size_t n = model.a_obs.size();
    if (n == 0)
        throw ShapeError("model needs at least one measured observable");
    if (model.b_obs.size() != n || model.m_obs.size() != n)
        throw ShapeError("observable families A, B, M must have equal length, got " +
                         std::to_string(n) + ", " + std::to_string(model.b_obs.size()) + ", " +
                         std::to_string(model.m_obs.size()));
    Eigen::Index d_o = model.object_state.dim();
    Eigen::Index d_p = model.probe_state.dim();
    if (d_o * d_p > tol.max_composite_dim)
        throw ModelTooLargeError("composite dimension " + std::to_string(d_o * d_p) +
                                 " exceeds limit " + std::to_string(tol.max_composite_dim));
    check_observable_family(model.a_obs, d_o, "A", tol);
    check_observable_family(model.b_obs, d_o, "B", tol);
    check_observable_family(model.m_obs, d_p, "M", tol);
    if (model.interaction.dim() != d_o * d_p)
        throw ShapeError("interaction dimension " + std::to_string(model.interaction.dim()) +
                         " does not match composite dimension " + std::to_string(d_o * d_p));
    double uni = model.interaction.unitarity_residual();
    if (uni > tol.unitary)
        throw ContractViolation("interaction is not unitary, residual " + fmt_residual(uni));

    FiniteNDSystem sys{.n = int(n),
                       .z_in = {},
                       .z_out = {},
                       .k_vec = {},
                       .state = QuantumState::product(model.object_state, model.probe_state, tol),
                       .out_commutation_residual = 0.0,
                       .reconstruction_residual = 0.0};

    Operator id_o = Operator::identity(d_o);
    Operator id_p = Operator::identity(d_p);
    const Eigen::MatrixXcd& u = model.interaction.entries();
    auto conjugate = [&](const Operator& op) {
        return Operator(u.adjoint() * op.entries() * u);
    };

    for (size_t i = 0; i < n; ++i)
        sys.z_in.push_back(tensor(model.a_obs[i], id_p, tol));
    for (size_t j = 0; j < n; ++j)
        sys.z_in.push_back(tensor(model.b_obs[j], id_p, tol));
    for (size_t i = 0; i < n; ++i)
        sys.z_out.push_back(conjugate(tensor(id_o, model.m_obs[i], tol)));
    for (size_t j = 0; j < n; ++j)
        sys.z_out.push_back(conjugate(tensor(model.b_obs[j], id_p, tol)));
    for (size_t a = 0; a < 2 * n; ++a)
        sys.k_vec.push_back(sys.z_out[a] - sys.z_in[a]);

    for (size_t a = 0; a < 2 * n; ++a)
        for (size_t b = a + 1; b < 2 * n; ++b)
            sys.out_commutation_residual =
                std::max(sys.out_commutation_residual,
                         maxabs(commutator(sys.z_out[a], sys.z_out[b]).entries()));
    for (size_t a = 0; a < 2 * n; ++a)
        sys.reconstruction_residual =
            std::max(sys.reconstruction_residual,
                     maxabs(sys.z_out[a].entries() -
                            (sys.z_in[a].entries() + sys.k_vec[a].entries())));
    return sys;
}

GaussianNDSystem build_nd_system(const GaussianMeasurementModel& model, const Tolerances& tol) {
    size_t n = model.a_obs.size();
    if (n == 0)
        throw ShapeError("model needs at least one measured observable");
    if (model.b_obs.size() != n || model.m_obs.size() != n)
        throw ShapeError("observable families A, B, M must have equal length, got " +
                         std::to_string(n) + ", " + std::to_string(model.b_obs.size()) + ", " +
                         std::to_string(model.m_obs.size()));
    if (model.object_modes < 1 || model.probe_modes < 1)
        throw ShapeError("object and probe need at least one mode each");
    CanonicalAlgebra alg = model.algebra();
    Eigen::Index dim = 2 * (model.object_modes + model.probe_modes);
    Eigen::Index obj_dim = 2 * model.object_modes;

    auto check_support = [&](const std::vector<LinearObservable>& obs, bool object_side,
                             const char* name) {
        for (size_t i = 0; i < obs.size(); ++i) {
            if (obs[i].coeffs.size() != dim)
                throw ShapeError(std::string(name) + "[" + std::to_string(i) + "] needs " +
                                 std::to_string(dim) + " coordinates, got " +
                                 std::to_string(obs[i].coeffs.size()));
            if (!obs[i].coeffs.allFinite() || !std::isfinite(obs[i].offset))
                throw ContractViolation(std::string(name) + "[" + std::to_string(i) +
                                        "] contains non-finite entries");
            for (Eigen::Index c = 0; c < dim; ++c) {
                bool on_object = c < obj_dim;
                if (on_object != object_side && obs[i].coeffs(c) != 0.0)
                    throw ContractViolation(std::string(name) + "[" + std::to_string(i) +
                                            "] must be supported on the " +
                                            (object_side ? "object" : "probe") +
                                            " coordinates, coefficient " + std::to_string(c) +
                                            " is non-zero");
            }
        }
        Eigen::MatrixXd w = alg.omega();
        for (size_t i = 0; i < obs.size(); ++i)
            for (size_t j = i + 1; j < obs.size(); ++j) {
                double res = std::abs(obs[i].coeffs.dot(w * obs[j].coeffs));
                double scale = std::max(1.0, obs[i].coeffs.cwiseAbs().maxCoeff() *
                                                 obs[j].coeffs.cwiseAbs().maxCoeff());
                if (res > tol.hermitian * scale)
                    throw ContractViolation(std::string(name) + "[" + std::to_string(i) +
                                            "] and " + name + "[" + std::to_string(j) +
                                            "] do not commute, residual " + fmt_residual(res));
            }
    };
    check_support(model.a_obs, true, "A");
    check_support(model.b_obs, true, "B");
    check_support(model.m_obs, false, "M");

    auto check_moments = [&](const GaussianMoments& mom, Eigen::Index want, const char* name) {
        if (mom.mean.size() != want || mom.cov.rows() != want || mom.cov.cols() != want)
            throw ShapeError(std::string(name) + " moments need " + std::to_string(want) +
                             " coordinates");
        if (!mom.mean.allFinite() || !mom.cov.allFinite())
            throw ContractViolation(std::string(name) + " moments contain non-finite entries");
        double sym = (mom.cov - mom.cov.transpose()).cwiseAbs().maxCoeff();
        if (sym > tol.hermitian * std::max(1.0, mom.cov.cwiseAbs().maxCoeff()))
            throw ContractViolation(std::string(name) + " covariance is not symmetric, residual " +
                                    fmt_residual(sym));
    };
    check_moments(model.object_moments, obj_dim, "object");
    check_moments(model.probe_moments, dim - obj_dim, "probe");

    LinearChannel chan(model.channel, alg, tol);

    GaussianNDSystem sys;
    sys.n = int(n);
    sys.algebra = alg;
    sys.moments.mean = Eigen::VectorXd::Zero(dim);
    sys.moments.mean.head(obj_dim) = model.object_moments.mean;
    sys.moments.mean.tail(dim - obj_dim) = model.probe_moments.mean;
    sys.moments.cov = Eigen::MatrixXd::Zero(dim, dim);
    sys.moments.cov.topLeftCorner(obj_dim, obj_dim) = model.object_moments.cov;
    sys.moments.cov.bottomRightCorner(dim - obj_dim, dim - obj_dim) = model.probe_moments.cov;

    for (size_t i = 0; i < n; ++i)
        sys.z_in.push_back(model.a_obs[i]);
    for (size_t j = 0; j < n; ++j)
        sys.z_in.push_back(model.b_obs[j]);
    for (size_t i = 0; i < n; ++i)
        sys.z_out.push_back(apply_channel(chan, model.m_obs[i]));
    for (size_t j = 0; j < n; ++j)
        sys.z_out.push_back(apply_channel(chan, model.b_obs[j]));
    for (size_t a = 0; a < 2 * n; ++a) {
        LinearObservable k;
        k.coeffs = sys.z_out[a].coeffs - sys.z_in[a].coeffs;
        k.offset = sys.z_out[a].offset - sys.z_in[a].offset;
        sys.k_vec.push_back(std::move(k));
    }

    Eigen::MatrixXd w = alg.omega();
    for (size_t a = 0; a < 2 * n; ++a)
        for (size_t b = a + 1; b < 2 * n; ++b)
            sys.out_commutation_residual =
                std::max(sys.out_commutation_residual,
                         std::abs(sys.z_out[a].coeffs.dot(w * sys.z_out[b].coeffs)));
    for (size_t a = 0; a < 2 * n; ++a)
        sys.reconstruction_residual = std::max(
            sys.reconstruction_residual,
            (sys.z_out[a].coeffs - sys.z_in[a].coeffs - sys.k_vec[a].coeffs)
                .cwiseAbs()
                .maxCoeff());
    return sys;
}

Eigen::MatrixXd nd_covariance(const FiniteNDSystem& sys, const QuantumState& state,
                              const Tolerances& tol) {
    PairTables t = finite_tables(sys, state);
    return take_real(sym_cov_complex(t.kk, t.kmean), tol, "noise-disturbance covariance").value;
}

Eigen::MatrixXd nd_covariance(const GaussianNDSystem& sys, const GaussianMoments& moments,
                              const Tolerances&) {
    int d = 2 * sys.n;
    Eigen::MatrixXd k(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            k(a, b) = moment_sym_cov(sys.k_vec[a], sys.k_vec[b], moments);
    return k;
}

Eigen::MatrixXd gamma_matrix(const FiniteNDSystem& sys, const QuantumState& state,
                             const Tolerances& tol) {
    PairTables t = finite_tables(sys, state);
    CommMatrices cm = comm_from_tables(t);
    return take_real(Complex(0, -1) * cm.cross, tol, "cross commutator matrix").value;
}

Eigen::MatrixXd gamma_matrix(const GaussianNDSystem& sys, const GaussianMoments&,
                             const Tolerances&) {
    int d = 2 * sys.n;
    Eigen::MatrixXd w = sys.algebra.omega();
    Eigen::MatrixXd g(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            g(a, b) = sys.z_in[a].coeffs.dot(w * sys.k_vec[b].coeffs) +
                      sys.k_vec[a].coeffs.dot(w * sys.z_in[b].coeffs);
    return g;
}

Eigen::MatrixXd g_matrix(const FiniteNDSystem& sys, const QuantumState& state,
                         const Tolerances& tol) {
    PairTables t = finite_tables(sys, state);
    CommMatrices cm = comm_from_tables(t);
    return take_real(Complex(0, -1) * cm.eg, tol, "input commutator matrix").value;
}

Eigen::MatrixXd g_matrix(const GaussianNDSystem& sys, const GaussianMoments&,
                         const Tolerances&) {
    int d = 2 * sys.n;
    Eigen::MatrixXd w = sys.algebra.omega();
    Eigen::MatrixXd g(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            g(a, b) = sys.z_in[a].coeffs.dot(w * sys.z_in[b].coeffs);
    return g;
}

MatrixOupResult matrix_oup(const Eigen::MatrixXd& k, const Eigen::MatrixXd& gamma,
                           const Eigen::MatrixXd& g, const Tolerances& tol) {
    if (k.rows() != k.cols() || gamma.rows() != gamma.cols() || g.rows() != g.cols() ||
        k.rows() != gamma.rows() || k.rows() != g.rows())
        throw ShapeError("matrix bound needs three equally sized square matrices");
    MatrixOupResult r;
    r.matrix = k.cast<Complex>() + Complex(0.0, 0.5) * (gamma + g).cast<Complex>();
    r.verdict = psd_check(r.matrix, tol);
    return r;
}

UncertaintyReport analyze(const FiniteMeasurementModel& model, const Tolerances& tol) {
    FiniteNDSystem sys = build_nd_system(model, tol);
    PairTables t = finite_tables(sys, sys.state);
    CommMatrices cm = comm_from_tables(t);

    AnalysisPieces p;
    p.backend = "finite";
    p.n = sys.n;
    p.k = take_real(sym_cov_complex(t.kk, t.kmean), tol, "noise-disturbance covariance");
    p.sigma = take_real(sym_cov_complex(t.zz, t.zmean), tol, "input covariance");
    p.gamma = take_real(Complex(0, -1) * cm.cross, tol, "cross commutator matrix");
    p.g = take_real(Complex(0, -1) * cm.eg, tol, "input commutator matrix");
    p.diag.out_commutation_residual = sys.out_commutation_residual;
    p.diag.reconstruction_residual = sys.reconstruction_residual;
    p.diag.derivation_identity_residual = maxabs(cm.eg + cm.cross + cm.kk);
    return assemble_report(std::move(p), tol);
}

UncertaintyReport analyze(const GaussianMeasurementModel& model, const Tolerances& tol) {
    GaussianNDSystem sys = build_nd_system(model, tol);

    AnalysisPieces p;
    p.backend = "gaussian";
    p.n = sys.n;
    p.k.value = nd_covariance(sys, sys.moments, tol);
    p.sigma.value = Eigen::MatrixXd(2 * sys.n, 2 * sys.n);
    for (int a = 0; a < 2 * sys.n; ++a)
        for (int b = 0; b < 2 * sys.n; ++b)
            p.sigma.value(a, b) = moment_sym_cov(sys.z_in[a], sys.z_in[b], sys.moments);
    p.gamma.value = gamma_matrix(sys, sys.moments, tol);
    p.g.value = g_matrix(sys, sys.moments, tol);
    p.diag.out_commutation_residual = sys.out_commutation_residual;
    p.diag.reconstruction_residual = sys.reconstruction_residual;
    {
        Eigen::MatrixXd closure =
            p.g.value + p.gamma.value +
            [&] {
                int d = 2 * sys.n;
                Eigen::MatrixXd w = sys.algebra.omega();
                Eigen::MatrixXd kk(d, d);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        kk(a, b) = sys.k_vec[a].coeffs.dot(w * sys.k_vec[b].coeffs);
                return kk;
            }();
        p.diag.derivation_identity_residual = maxabs_real(closure);
    }
    CanonicalAlgebra obj_alg{model.object_modes, model.comm_constant};
    CanonicalAlgebra probe_alg{model.probe_modes, model.comm_constant};
    p.object_physicality = physicality_check(model.object_moments, obj_alg, tol);
    p.probe_physicality = physicality_check(model.probe_moments, probe_alg, tol);
    return assemble_report(std::move(p), tol);
}

UncertaintyReport analyze(const MeasurementModel& model, const Tolerances& tol) {
    return std::visit([&](const auto& m) { return analyze(m, tol); }, model);
}

IdentityReport derivation_identity_check(const FiniteNDSystem& sys, const QuantumState& state,
                                         const std::vector<Eigen::VectorXcd>& lambdas,
                                         const Tolerances& tol) {
    PairTables t = finite_tables(sys, state);
    CommMatrices cm = comm_from_tables(t);
    RealMatrix k = take_real(sym_cov_complex(t.kk, t.kmean), tol, "noise-disturbance covariance");
    RealMatrix gamma = take_real(Complex(0, -1) * cm.cross, tol, "cross commutator matrix");
    RealMatrix g = take_real(Complex(0, -1) * cm.eg, tol, "input commutator matrix");
    MatrixOupResult oup = matrix_oup(k.value, gamma.value, g.value, tol);
    return identity_from_matrices(cm, oup.matrix, lambdas, tol);
}

IdentityReport derivation_identity_check(const GaussianNDSystem& sys,
                                         const GaussianMoments& moments,
                                         const std::vector<Eigen::VectorXcd>& lambdas,
                                         const Tolerances& tol) {
    int d = 2 * sys.n;
    Eigen::MatrixXd w = sys.algebra.omega();
    auto bracket = [&](const std::vector<LinearObservable>& xs,
                       const std::vector<LinearObservable>& ys) {
        Eigen::MatrixXcd m(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                m(a, b) = Complex(0.0, xs[a].coeffs.dot(w * ys[b].coeffs));
        return m;
    };
    CommMatrices cm;
    cm.eg = bracket(sys.z_in, sys.z_in);
    cm.cross = bracket(sys.z_in, sys.k_vec) + bracket(sys.k_vec, sys.z_in);
    cm.kk = bracket(sys.k_vec, sys.k_vec);
    Eigen::MatrixXd k = nd_covariance(sys, moments, tol);
    Eigen::MatrixXd gamma = gamma_matrix(sys, moments, tol);
    Eigen::MatrixXd g = g_matrix(sys, moments, tol);
    MatrixOupResult oup = matrix_oup(k, gamma, g, tol);
    return identity_from_matrices(cm, oup.matrix, lambdas, tol);
}

InequalityCheck robertson_check(const Operator& a, const Operator& b, const QuantumState& s,
                                const Tolerances& tol) {
    Operator da = centered(a, s, tol);
    Operator db = centered(b, s, tol);
    double var_a = product_expectation(da, da, s).real();
    double var_b = product_expectation(db, db, s).real();
    double c = 0.5 * std::abs(expectation(commutator(a, b), s));
    return make_check(clamped_sqrt(var_a) * clamped_sqrt(var_b), c, tol.psd);
}

PsdVerdict rsup_check(const std::vector<Operator>& zs, const QuantumState& s,
                      const Tolerances& tol) {
    if (zs.empty())
        throw ShapeError("state uncertainty check needs at least one observable");
    int d = int(zs.size());
    Eigen::MatrixXcd pp(d, d);
    Eigen::VectorXcd mean(d);
    for (int a = 0; a < d; ++a)
        mean(a) = expectation(zs[a], s);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            pp(a, b) = product_expectation(zs[a], zs[b], s);
    Eigen::MatrixXcd sigma = sym_cov_complex(pp, mean);
    Eigen::MatrixXcd comm = pp - pp.transpose(); // <[Z_a, Z_b]>
    Eigen::MatrixXcd m = 0.5 * (sigma + sigma.adjoint()) + 0.5 * comm;
    return psd_check(m, tol);
}

int verdict_exit_code(const UncertaintyReport& report) {
    return report.all_hold ? 0 : 2;
}

} // namespace ur
