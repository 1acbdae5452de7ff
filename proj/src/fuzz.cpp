#include "ur/fuzz.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace ur {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Eigen::MatrixXcd ginibre(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd z(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) {
            double re = g(rng);
            double im = g(rng);
            z(r, c) = Complex(re, im) / std::sqrt(2.0);
        }
    return z;
}

Eigen::MatrixXcd haar_from_rng(Eigen::Index dim, std::mt19937_64& rng) {
    Eigen::MatrixXcd z = ginibre(dim, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::VectorXcd d = qr.matrixQR().diagonal();
    for (Eigen::Index i = 0; i < dim; ++i) {
        double a = std::abs(d(i));
        q.col(i) *= a > 0.0 ? d(i) / a : Complex(1.0, 0.0);
    }
    return q;
}

Eigen::VectorXcd unit_from_rng(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double re = g(rng);
        double im = g(rng);
        v(i) = Complex(re, im);
    }
    v /= v.norm();
    return v;
}

Eigen::MatrixXcd hermitian_from_rng(Eigen::Index dim, std::mt19937_64& rng) {
    Eigen::MatrixXcd z = ginibre(dim, rng);
    return 0.5 * (z + z.adjoint());
}

// Commuting family: powers of one random hermitian seed operator.
std::vector<Operator> commuting_family(Eigen::Index dim, int n, std::mt19937_64& rng) {
    Eigen::MatrixXcd h = hermitian_from_rng(dim, rng);
    std::vector<Operator> out;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
    for (int k = 0; k < n; ++k) {
        p = p * h;
        out.push_back(Operator(0.5 * (p + p.adjoint())));
    }
    return out;
}

Eigen::MatrixXd interleaved_form(int modes, double c) {
    return CanonicalAlgebra{modes, c}.omega();
}

Eigen::MatrixXd symplectic_for_omega(const Eigen::MatrixXd& omega, std::mt19937_64& rng,
                                     double spread) {
    Eigen::Index d = omega.rows();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd h(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j) {
            double v = spread * u(rng) / double(d);
            h(i, j) = v;
            h(j, i) = v;
        }
    // exp(omega h) preserves omega for symmetric h
    Eigen::MatrixXd a = omega * h;
    return a.exp();
}

GaussianMoments random_physical_moments(int modes, double c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd omega = interleaved_form(modes, c);
    Eigen::MatrixXd s = symplectic_for_omega(omega, rng, 2.0);
    Eigen::VectorXd d(2 * modes);
    for (int k = 0; k < modes; ++k) {
        double nu = 1.0 + std::abs(u(rng)) * 2.0; // symplectic eigenvalue >= 1
        d(2 * k) = (c / 2.0) * nu;
        d(2 * k + 1) = (c / 2.0) * nu;
    }
    GaussianMoments m;
    m.cov = s * d.asDiagonal() * s.transpose();
    m.mean.resize(2 * modes);
    for (int i = 0; i < 2 * modes; ++i)
        m.mean(i) = u(rng);
    return m;
}

std::vector<LinearObservable> linear_family(int total_modes, int first_coord, int width, int n,
                                            std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // One random direction per family member; members of the same family
    // must commute, so draw them from a common lagrangian-like span built
    // off a single direction when n > 1.
    std::vector<LinearObservable> out;
    Eigen::VectorXd base = Eigen::VectorXd::Zero(2 * total_modes);
    for (int c = 0; c < width; ++c)
        base(first_coord + c) = u(rng);
    if (base.cwiseAbs().maxCoeff() < 0.1)
        base(first_coord) += 0.5;
    for (int k = 0; k < n; ++k) {
        LinearObservable o;
        double mult = u(rng);
        mult += mult >= 0.0 ? 0.25 : -0.25; // keep members away from zero
        o.coeffs = base * (k == 0 ? 1.0 : mult); // scalar multiples commute
        o.offset = u(rng);
        out.push_back(std::move(o));
    }
    return out;
}

double verdict_scale(const PsdVerdict& v, double psd_tol) {
    return psd_tol > 0.0 ? v.tolerance_used / psd_tol : 1.0;
}

} // namespace

Eigen::MatrixXcd haar_unitary(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return haar_from_rng(dim, rng);
}

Eigen::VectorXcd random_unit_vector(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return unit_from_rng(dim, rng);
}

Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return hermitian_from_rng(dim, rng);
}

FiniteMeasurementModel random_finite_model(int object_dim, int probe_dim, int n,
                                           std::uint64_t seed, const Tolerances& tol) {
    if (object_dim < 2 || probe_dim < 2)
        throw DomainError("random model needs dimensions >= 2");
    if (n < 1)
        throw DomainError("random model needs n >= 1");
    std::mt19937_64 rng(splitmix64(seed));
    std::vector<Operator> a = commuting_family(object_dim, n, rng);
    std::vector<Operator> b = commuting_family(object_dim, n, rng);
    std::vector<Operator> m = commuting_family(probe_dim, n, rng);
    Eigen::VectorXcd psi = unit_from_rng(object_dim, rng);
    Eigen::VectorXcd xi = unit_from_rng(probe_dim, rng);
    Eigen::MatrixXcd u = haar_from_rng(object_dim * probe_dim, rng);
    return FiniteMeasurementModel{.object_state = QuantumState::pure(psi, tol),
                                  .probe_state = QuantumState::pure(xi, tol),
                                  .a_obs = std::move(a),
                                  .b_obs = std::move(b),
                                  .m_obs = std::move(m),
                                  .interaction = Operator(std::move(u))};
}

GaussianMeasurementModel random_gaussian_model(int object_modes, int probe_modes, int n,
                                               std::uint64_t seed, const Tolerances&) {
    if (object_modes < 1 || probe_modes < 1)
        throw DomainError("random model needs at least one mode per side");
    if (n < 1)
        throw DomainError("random model needs n >= 1");
    std::mt19937_64 rng(splitmix64(seed));
    GaussianMeasurementModel m;
    m.object_modes = object_modes;
    m.probe_modes = probe_modes;
    m.comm_constant = 0.5;
    int total = object_modes + probe_modes;
    m.a_obs = linear_family(total, 0, 2 * object_modes, n, rng);
    m.b_obs = linear_family(total, 0, 2 * object_modes, n, rng);
    m.m_obs = linear_family(total, 2 * object_modes, 2 * probe_modes, n, rng);
    Eigen::MatrixXd omega = interleaved_form(total, m.comm_constant);
    m.channel = symplectic_for_omega(omega, rng, 4.0);
    m.object_moments = random_physical_moments(object_modes, m.comm_constant, rng);
    m.probe_moments = random_physical_moments(probe_modes, m.comm_constant, rng);
    return m;
}

FuzzSummary run_fuzz(const FuzzConfig& config) {
    if (config.trials < 0)
        throw DomainError("trial count must be non-negative");
    FuzzSummary sum;
    sum.config = config;
    double identity_total = 0.0;
    bool have_margin = false;
    constexpr size_t kMaxViolatingModels = 4;

    for (int t = 0; t < config.trials; ++t) {
        std::uint64_t trial_seed = splitmix64(config.seed ^ (0x517cc1b727220a95ULL + t));
        MeasurementModel model = [&]() -> MeasurementModel {
            if (config.backend == FuzzBackend::finite)
                return random_finite_model(config.object_dim, config.probe_dim, config.n,
                                           trial_seed, config.tol);
            if (config.include_amplifier_point && t == 0)
                return bae_model(1.0);
            return random_gaussian_model(config.object_modes, config.probe_modes, config.n,
                                         trial_seed, config.tol);
        }();

        UncertaintyReport rep = analyze(model, config.tol);

        FuzzTrialStat st;
        st.index = t;
        st.matrix_holds = rep.matrix_oup.is_psd;
        st.oup_margin =
            rep.matrix_oup.min_eigenvalue / verdict_scale(rep.matrix_oup, config.tol.psd);
        st.physical = true;
        if (rep.object_physicality)
            st.physical = st.physical && rep.object_physicality->is_psd;
        if (rep.probe_physicality)
            st.physical = st.physical && rep.probe_physicality->is_psd;
        st.ozawa_holds = true;
        bool first_pair = true;
        for (const PairReport& p : rep.pairs) {
            st.ozawa_holds = st.ozawa_holds && p.ozawa.holds;
            double slack = p.ozawa.lhs - p.ozawa.rhs;
            st.ozawa_slack = first_pair ? slack : std::min(st.ozawa_slack, slack);
            first_pair = false;
        }

        // Sesquilinear closure probes with fresh random directions.
        {
            std::mt19937_64 lrng(splitmix64(trial_seed ^ 0xa0761d6478bd642fULL));
            std::vector<Eigen::VectorXcd> lambdas;
            for (int l = 0; l < config.lambdas_per_trial; ++l)
                lambdas.push_back(unit_from_rng(2 * rep.n, lrng));
            IdentityReport idr = std::visit(
                [&](const auto& mm) {
                    auto sys = build_nd_system(mm, config.tol);
                    if constexpr (std::is_same_v<std::decay_t<decltype(sys)>, FiniteNDSystem>)
                        return derivation_identity_check(sys, sys.state, lambdas, config.tol);
                    else
                        return derivation_identity_check(sys, sys.moments, lambdas, config.tol);
                },
                model);
            st.identity_residual = idr.max_identity_residual;
        }

        identity_total += st.identity_residual;
        sum.trials_run += 1;
        if (st.physical) {
            sum.physical_trials += 1;
            if (!st.matrix_holds) {
                sum.violations_physical += 1;
                sum.violating.push_back(st);
                if (sum.violating_models.size() < kMaxViolatingModels)
                    sum.violating_models.push_back(serialize_model(model));
            }
            if (!have_margin || st.oup_margin < sum.min_margin_physical.oup_margin) {
                sum.min_margin_physical = st;
                sum.min_margin_model = serialize_model(model);
                have_margin = true;
            }
        } else if (!st.matrix_holds) {
            sum.violations_unphysical += 1;
        }
        if (st.ozawa_holds && st.ozawa_slack > 1e-3 && std::abs(st.oup_margin) <= 1e-6)
            sum.scalar_slack_matrix_tight += 1;
        if (st.identity_residual >= sum.max_identity_residual) {
            sum.max_identity_residual = st.identity_residual;
            sum.max_identity_trial = st;
            sum.max_identity_model = serialize_model(model);
        }
    }
    if (sum.trials_run > 0)
        sum.mean_identity_residual = identity_total / sum.trials_run;
    return sum;
}

namespace {

Json stat_to_json(const FuzzTrialStat& st) {
    Json j;
    j["index"] = st.index;
    j["oup_margin"] = st.oup_margin;
    j["ozawa_slack"] = st.ozawa_slack;
    j["identity_residual"] = st.identity_residual;
    j["physical"] = st.physical;
    j["matrix_holds"] = st.matrix_holds;
    j["ozawa_holds"] = st.ozawa_holds;
    return j;
}

} // namespace

Json fuzz_to_json(const FuzzSummary& sum) {
    Json j;
    Json cfg;
    cfg["backend"] = sum.config.backend == FuzzBackend::finite ? "finite" : "gaussian";
    if (sum.config.backend == FuzzBackend::finite) {
        cfg["object_dim"] = sum.config.object_dim;
        cfg["probe_dim"] = sum.config.probe_dim;
    } else {
        cfg["object_modes"] = sum.config.object_modes;
        cfg["probe_modes"] = sum.config.probe_modes;
        cfg["amplifier_point_included"] = sum.config.include_amplifier_point;
    }
    cfg["n"] = sum.config.n;
    cfg["trials"] = sum.config.trials;
    cfg["seed"] = sum.config.seed;
    cfg["lambdas_per_trial"] = sum.config.lambdas_per_trial;
    j["config"] = std::move(cfg);
    j["trials_run"] = sum.trials_run;
    j["physical_trials"] = sum.physical_trials;
    j["violations_physical"] = sum.violations_physical;
    j["violations_unphysical"] = sum.violations_unphysical;
    j["scalar_slack_matrix_tight"] = sum.scalar_slack_matrix_tight;
    j["max_identity_residual"] = sum.max_identity_residual;
    j["mean_identity_residual"] = sum.mean_identity_residual;
    j["min_margin_physical"] =
        sum.trials_run > 0 ? stat_to_json(sum.min_margin_physical) : Json(nullptr);
    j["min_margin_model"] = sum.min_margin_model.is_null() ? Json(nullptr) : sum.min_margin_model;
    j["max_identity_trial"] =
        sum.trials_run > 0 ? stat_to_json(sum.max_identity_trial) : Json(nullptr);
    j["max_identity_model"] =
        sum.max_identity_model.is_null() ? Json(nullptr) : sum.max_identity_model;
    Json viol = Json::array();
    for (const auto& st : sum.violating)
        viol.push_back(stat_to_json(st));
    j["violating_trials"] = std::move(viol);
    Json vm = Json::array();
    for (const auto& m : sum.violating_models)
        vm.push_back(m);
    j["violating_models"] = std::move(vm);
    return j;
}

std::string fuzz_to_text(const FuzzSummary& sum) {
    std::ostringstream os;
    os << "== fuzz campaign ==\n";
    os << "backend: " << (sum.config.backend == FuzzBackend::finite ? "finite" : "gaussian")
       << "\n";
    os << "trials: " << sum.trials_run << " (seed " << sum.config.seed << ")\n";
    os << "physical trials: " << sum.physical_trials << "\n";
    os << "matrix violations on physical models: " << sum.violations_physical << "\n";
    os << "matrix violations on unphysical models: " << sum.violations_unphysical << "\n";
    os << "scalar slack with near-zero matrix margin: " << sum.scalar_slack_matrix_tight
       << "\n";
    os << "closure identity residual: max " << sum.max_identity_residual << ", mean "
       << sum.mean_identity_residual << "\n";
    if (sum.trials_run > 0) {
        os << "smallest matrix margin on a physical model: trial "
           << sum.min_margin_physical.index << ", margin " << sum.min_margin_physical.oup_margin
           << "\n";
        os << "replay models embedded in the JSON rendering (--format json)\n";
    }
    return os.str();
}

} // namespace ur
