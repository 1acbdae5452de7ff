#include "ur/report_io.hpp"

#include <cstdio>
#include <sstream>

#include "ur/version.hpp"

namespace ur {

namespace {

Json verdict_to_json(const PsdVerdict& v) {
    Json j;
    j["is_psd"] = v.is_psd;
    j["min_eigenvalue"] = v.min_eigenvalue;
    j["determinant"] = Json{{"real", v.determinant}, {"imag_residual", v.det_imag_residual}};
    j["tolerance_used"] = v.tolerance_used;
    return j;
}

Json check_to_json(const InequalityCheck& c) {
    return Json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v)
        out.push_back(x);
    return out;
}

const char* yn(bool b) {
    return b ? "yes" : "no";
}

const char* holds_word(bool b) {
    return b ? "HOLDS" : "VIOLATED";
}

void print_matrix(std::ostream& os, const char* label, const Eigen::MatrixXd& m) {
    os << label << ":\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << " ";
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << " " << fmt12(m(r, c));
        os << "\n";
    }
}

void print_verdict(std::ostream& os, const PsdVerdict& v) {
    os << holds_word(v.is_psd) << "\n"
       << "  min eigenvalue: " << fmt12(v.min_eigenvalue) << "\n"
       << "  determinant: " << fmt12(v.determinant) << " (imag residual "
       << fmt12(v.det_imag_residual) << ")\n"
       << "  tolerance used: " << fmt12(v.tolerance_used) << "\n";
}

void print_check(std::ostream& os, const char* label, const InequalityCheck& c,
                 const char* note = "") {
    os << "  " << label << ": lhs " << fmt12(c.lhs) << " >= rhs " << fmt12(c.rhs) << "  "
       << holds_word(c.holds) << note << "\n";
}

std::string model_summary(const MeasurementModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            std::ostringstream os;
            if constexpr (std::is_same_v<T, FiniteMeasurementModel>) {
                os << "finite backend, object dim " << m.object_state.dim() << ", probe dim "
                   << m.probe_state.dim() << ", " << m.a_obs.size() << " measured pair(s)";
            } else {
                os << "gaussian backend, " << m.object_modes << " object mode(s), "
                   << m.probe_modes << " probe mode(s), comm constant "
                   << fmt12(m.comm_constant) << ", " << m.a_obs.size() << " measured pair(s)";
            }
            return os.str();
        },
        model);
}

} // namespace

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Json report_to_json(const ReportDocument& doc) {
    const UncertaintyReport& r = doc.report;
    Json j;
    j["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
    j["model"] = serialize_model(doc.model);
    j["tolerances"] = tolerances_to_json(doc.tolerances);
    if (doc.seed)
        j["seed"] = *doc.seed;
    else
        j["seed"] = nullptr;

    Json rep;
    rep["backend"] = r.backend;
    rep["n"] = r.n;
    rep["k_matrix"] = matrix_to_json(r.k_matrix);
    rep["gamma"] = matrix_to_json(r.gamma);
    rep["g_exp"] = matrix_to_json(r.g_exp);
    rep["sigma_in"] = matrix_to_json(r.sigma_in);
    rep["matrix_oup"] = verdict_to_json(r.matrix_oup);
    rep["epsilon"] = vector_to_json(r.epsilon);
    rep["eta"] = vector_to_json(r.eta);
    rep["sigma_a"] = vector_to_json(r.sigma_a);
    rep["sigma_b"] = vector_to_json(r.sigma_b);

    Json pairs = Json::array();
    for (const PairReport& p : r.pairs) {
        Json pj;
        pj["i"] = p.i + 1;
        pj["j"] = p.j + 1;
        pj["ozawa"] = check_to_json(p.ozawa);
        pj["heisenberg_nd"] = check_to_json(p.heisenberg_nd);
        pj["robertson"] = check_to_json(p.robertson);
        Json dc;
        dc["variance_product"] = p.det_chain.variance_product;
        dc["cross_sq"] = p.det_chain.cross_sq;
        dc["comm_sq"] = p.det_chain.comm_sq;
        dc["det_bound_holds"] = p.det_chain.det_bound_holds;
        dc["gap_bound"] = check_to_json(p.det_chain.gap_bound);
        dc["difference_bound"] = check_to_json(p.det_chain.difference_bound);
        pj["det_chain"] = std::move(dc);
        pairs.push_back(std::move(pj));
    }
    rep["pairs"] = std::move(pairs);
    rep["rsup"] = verdict_to_json(r.rsup);
    rep["independent_intervention"] = r.independent_intervention;
    if (r.object_physicality)
        rep["object_physicality"] = verdict_to_json(*r.object_physicality);
    if (r.probe_physicality)
        rep["probe_physicality"] = verdict_to_json(*r.probe_physicality);

    Json diag;
    diag["out_commutation_residual"] = r.diagnostics.out_commutation_residual;
    diag["reconstruction_residual"] = r.diagnostics.reconstruction_residual;
    diag["derivation_identity_residual"] = r.diagnostics.derivation_identity_residual;
    diag["k_imag_residual"] = r.diagnostics.k_imag_residual;
    diag["k_symmetry_residual"] = r.diagnostics.k_symmetry_residual;
    diag["gamma_imag_residual"] = r.diagnostics.gamma_imag_residual;
    diag["gamma_skew_residual"] = r.diagnostics.gamma_skew_residual;
    diag["g_imag_residual"] = r.diagnostics.g_imag_residual;
    diag["g_skew_residual"] = r.diagnostics.g_skew_residual;
    rep["diagnostics"] = std::move(diag);
    rep["all_hold"] = r.all_hold;

    j["report"] = std::move(rep);
    j["duration_seconds"] = doc.duration_seconds;
    return j;
}

std::string report_to_text(const ReportDocument& doc) {
    const UncertaintyReport& r = doc.report;
    std::ostringstream os;
    os << "== uncertainty report ==\n";
    os << "model: " << model_summary(doc.model) << "\n";
    os << "backend: " << r.backend << "\n";
    os << "n: " << r.n << "\n";
    os << "tolerances: hermitian " << fmt12(doc.tolerances.hermitian) << ", unitary "
       << fmt12(doc.tolerances.unitary) << ", norm " << fmt12(doc.tolerances.norm) << ", psd "
       << fmt12(doc.tolerances.psd) << "\n";
    if (doc.seed)
        os << "seed: " << *doc.seed << "\n";
    os << "\n";

    print_matrix(os, "K (noise-disturbance covariance)", r.k_matrix);
    print_matrix(os, "Gamma (cross commutator)", r.gamma);
    print_matrix(os, "G (input commutator)", r.g_exp);
    print_matrix(os, "Sigma_in (input covariance)", r.sigma_in);
    os << "\n";

    os << "matrix bound K + (i/2)(Gamma + G) >= 0: ";
    print_verdict(os, r.matrix_oup);
    os << "independent intervention (Gamma = 0): " << yn(r.independent_intervention) << "\n\n";

    for (int i = 0; i < r.n; ++i) {
        os << "epsilon[" << (i + 1) << "] = " << fmt12(r.epsilon[i]) << ", eta[" << (i + 1)
           << "] = " << fmt12(r.eta[i]) << ", sigma_a[" << (i + 1) << "] = "
           << fmt12(r.sigma_a[i]) << ", sigma_b[" << (i + 1) << "] = " << fmt12(r.sigma_b[i])
           << "\n";
    }
    os << "\n";

    for (const PairReport& p : r.pairs) {
        os << "pair (" << (p.i + 1) << ", " << (p.j + 1) << "):\n";
        print_check(os, "ozawa", p.ozawa);
        print_check(os, "heisenberg_nd", p.heisenberg_nd, " (informational)");
        print_check(os, "robertson", p.robertson);
        os << "  det bound: " << fmt12(p.det_chain.variance_product) << " >= "
           << fmt12(p.det_chain.cross_sq) << " + " << fmt12(p.det_chain.comm_sq) << "  "
           << holds_word(p.det_chain.det_bound_holds) << "\n";
        print_check(os, "gap bound", p.det_chain.gap_bound);
        print_check(os, "difference bound", p.det_chain.difference_bound);
    }
    os << "\n";

    os << "state check (RSUP) Sigma_in + (i/2) G >= 0: ";
    print_verdict(os, r.rsup);
    if (r.object_physicality) {
        os << "object moments physical: ";
        print_verdict(os, *r.object_physicality);
    }
    if (r.probe_physicality) {
        os << "probe moments physical: ";
        print_verdict(os, *r.probe_physicality);
    }
    os << "\n";

    os << "diagnostics:\n";
    os << "  out commutation residual: " << fmt12(r.diagnostics.out_commutation_residual)
       << "\n";
    os << "  reconstruction residual: " << fmt12(r.diagnostics.reconstruction_residual) << "\n";
    os << "  derivation identity residual: "
       << fmt12(r.diagnostics.derivation_identity_residual) << "\n";
    os << "  k imag residual: " << fmt12(r.diagnostics.k_imag_residual) << "\n";
    os << "  k symmetry residual: " << fmt12(r.diagnostics.k_symmetry_residual) << "\n";
    os << "  gamma imag residual: " << fmt12(r.diagnostics.gamma_imag_residual) << "\n";
    os << "  gamma skew residual: " << fmt12(r.diagnostics.gamma_skew_residual) << "\n";
    os << "  g imag residual: " << fmt12(r.diagnostics.g_imag_residual) << "\n";
    os << "  g skew residual: " << fmt12(r.diagnostics.g_skew_residual) << "\n";
    os << "\n";
    os << "all certified inequalities hold: " << yn(r.all_hold) << "\n";
    os << "duration_seconds: " << fmt12(doc.duration_seconds) << "\n";
    return os.str();
}

} // namespace ur
