#include "ur/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "ur/builtin_models.hpp"
#include "ur/fuzz.hpp"
#include "ur/report_io.hpp"
#include "ur/symplectic.hpp"
#include "ur/version.hpp"

namespace ur {

namespace {

std::optional<double> env_tolerance() {
    const char* v = std::getenv("UR_TOL");
    if (!v || !*v)
        return std::nullopt;
    char* end = nullptr;
    double t = std::strtod(v, &end);
    if (end == v || *end != '\0' || !std::isfinite(t) || t <= 0.0)
        throw DomainError("UR_TOL must be a positive number, got '" + std::string(v) + "'");
    return t;
}

Tolerances resolve_tolerances(const std::optional<double>& cli_tol,
                              const std::optional<Tolerances>& file_tol) {
    Tolerances t;
    if (auto env = env_tolerance())
        t = Tolerances::uniform(*env);
    if (file_tol)
        t = *file_tol;
    if (cli_tol)
        t = Tolerances::uniform(*cli_tol);
    return t;
}

struct TimedReport {
    ReportDocument doc;
};

TimedReport analyze_to_document(const MeasurementModel& model, const Tolerances& tol,
                                std::optional<std::uint64_t> seed) {
    auto t0 = std::chrono::steady_clock::now();
    UncertaintyReport rep = analyze(model, tol);
    auto t1 = std::chrono::steady_clock::now();
    TimedReport out{ReportDocument{.model = model,
                                   .tolerances = tol,
                                   .seed = seed,
                                   .report = std::move(rep),
                                   .duration_seconds =
                                       std::chrono::duration<double>(t1 - t0).count()}};
    return out;
}

void emit_report(const ReportDocument& doc, const std::string& format, std::ostream& out) {
    if (format == "json")
        out << report_to_json(doc).dump(2) << "\n";
    else
        out << report_to_text(doc);
}

MeasurementModel make_example(const std::string& name, double gain, bool gain_given) {
    if (name == "bae")
        return bae_model(gain);
    if (gain_given)
        throw DomainError("--gain only applies to the bae example");
    if (name == "identity")
        return make_identity_model();
    if (name == "cnot")
        return make_cnot_model();
    throw DomainError("unknown example '" + name + "', available: bae, identity, cnot");
}

Json verdict_json(const PsdVerdict& v) {
    return Json{{"is_psd", v.is_psd},
                {"min_eigenvalue", v.min_eigenvalue},
                {"determinant", Json{{"real", v.determinant},
                                     {"imag_residual", v.det_imag_residual}}},
                {"tolerance_used", v.tolerance_used}};
}

Json check_json(const InequalityCheck& c) {
    return Json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
}

Json matrix2_json(const Eigen::Matrix2d& m) {
    return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

int cmd_analyze(const std::string& file, const std::string& format,
                const std::optional<double>& cli_tol, std::ostream& out) {
    ParsedModelFile parsed = load_model_file(file);
    Tolerances tol = resolve_tolerances(cli_tol, parsed.tolerances);
    TimedReport tr = analyze_to_document(parsed.model, tol, parsed.seed);
    emit_report(tr.doc, format, out);
    return verdict_exit_code(tr.doc.report);
}

int cmd_example(const std::string& name, double gain, bool gain_given,
                const std::string& emit_model_path, const std::string& format,
                const std::optional<double>& cli_tol, std::ostream& out) {
    MeasurementModel model = make_example(name, gain, gain_given);
    Tolerances tol = resolve_tolerances(cli_tol, std::nullopt);
    if (!emit_model_path.empty()) {
        std::ofstream f(emit_model_path);
        if (!f)
            throw Error("cannot write model file '" + emit_model_path + "'");
        f << serialize_model(model).dump(2) << "\n";
    }
    TimedReport tr = analyze_to_document(model, tol, std::nullopt);
    emit_report(tr.doc, format, out);
    return verdict_exit_code(tr.doc.report);
}

int cmd_sweep(const std::string& name, const std::string& param, double min_v, double max_v,
              int steps, const std::string& format, const std::optional<double>& cli_tol,
              std::ostream& out) {
    if (name != "bae")
        throw DomainError("sweep supports the bae example only");
    if (param != "gain")
        throw DomainError("sweep supports --param gain only");
    if (steps < 1)
        throw DomainError("--steps must be >= 1");
    Tolerances tol = resolve_tolerances(cli_tol, std::nullopt);

    Json rows = Json::array();
    for (int k = 0; k < steps; ++k) {
        double g = steps == 1 ? min_v : min_v + k * (max_v - min_v) / double(steps - 1);
        UncertaintyReport rep = analyze(bae_model(g), tol);
        Json row;
        row["gain"] = g;
        row["epsilon"] = rep.epsilon[0];
        row["eta"] = rep.eta[0];
        row["eps_eta"] = rep.epsilon[0] * rep.eta[0];
        row["min_eigenvalue"] = rep.matrix_oup.min_eigenvalue;
        row["matrix_holds"] = rep.matrix_oup.is_psd;
        row["ozawa_holds"] = rep.pairs[0].ozawa.holds;
        rows.push_back(std::move(row));
    }
    if (format == "json") {
        Json doc;
        doc["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
        doc["sweep"] = Json{{"example", name}, {"param", param}, {"min", min_v},
                            {"max", max_v}, {"steps", steps}};
        doc["rows"] = std::move(rows);
        out << doc.dump(2) << "\n";
    } else {
        out << "== sweep: " << name << ", " << param << " from " << fmt12(min_v) << " to "
            << fmt12(max_v) << " in " << steps << " step(s) ==\n";
        out << "gain epsilon eta eps_eta min_eigenvalue matrix ozawa\n";
        for (const Json& row : rows) {
            out << fmt12(row["gain"].get<double>()) << " "
                << fmt12(row["epsilon"].get<double>()) << " "
                << fmt12(row["eta"].get<double>()) << " "
                << fmt12(row["eps_eta"].get<double>()) << " "
                << fmt12(row["min_eigenvalue"].get<double>()) << " "
                << (row["matrix_holds"].get<bool>() ? "HOLDS" : "VIOLATED") << " "
                << (row["ozawa_holds"].get<bool>() ? "HOLDS" : "VIOLATED") << "\n";
        }
    }
    return 0;
}

int cmd_fuzz(const FuzzConfig& config, const std::string& format, std::ostream& out) {
    FuzzSummary sum = run_fuzz(config);
    if (format == "text")
        out << fuzz_to_text(sum);
    else
        out << fuzz_to_json(sum).dump(2) << "\n";
    return sum.violations_physical > 0 ? 2 : 0;
}

int cmd_covariance(const std::string& file, double angle, int random_s, std::uint64_t seed,
                   const std::string& format, const std::optional<double>& cli_tol,
                   std::ostream& out) {
    ParsedModelFile parsed = load_model_file(file);
    Tolerances tol = resolve_tolerances(cli_tol, parsed.tolerances);
    RotatedOzawa rot = rotated_ozawa_experiment(parsed.model, angle, tol);

    int flips = 0;
    double max_margin_change = 0.0;
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
    UncertaintyReport base = analyze(parsed.model, tol);
    for (int t = 0; t < random_s; ++t) {
        Eigen::MatrixXd s = random_symplectic(1, seed + std::uint64_t(t));
        TransformedND tn = transform_nd(s, base.k_matrix, zero, base.g_exp);
        PsdVerdict v = matrix_oup(tn.k, tn.gamma, tn.g, tol).verdict;
        if (v.is_psd != base.matrix_oup.is_psd)
            ++flips;
        max_margin_change = std::max(
            max_margin_change, std::abs(v.min_eigenvalue - base.matrix_oup.min_eigenvalue));
    }

    if (format == "json") {
        Json doc;
        doc["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
        doc["angle"] = rot.angle;
        doc["gamma_scale"] = rot.gamma_scale;
        doc["k_before"] = matrix2_json(rot.k_before);
        doc["k_after"] = matrix2_json(rot.k_after);
        doc["eps_sq_before"] = rot.eps_sq_before;
        doc["eta_sq_before"] = rot.eta_sq_before;
        doc["cross_before"] = rot.cross_before;
        doc["eps_sq_after"] = rot.eps_sq_after;
        doc["eta_sq_after"] = rot.eta_sq_after;
        doc["cross_after"] = rot.cross_after;
        doc["scalar_before"] = check_json(rot.scalar_before);
        doc["rotated_scalar_as_published"] = check_json(rot.rotated_scalar);
        doc["matrix_before"] = verdict_json(rot.matrix_before);
        doc["matrix_after"] = verdict_json(rot.matrix_after);
        if (random_s > 0)
            doc["random_congruences"] = Json{{"count", random_s},
                                             {"seed", seed},
                                             {"verdict_flips", flips},
                                             {"max_min_eigenvalue_change", max_margin_change}};
        out << doc.dump(2) << "\n";
    } else {
        out << "== covariance frame rotation ==\n";
        out << "angle: " << fmt12(angle) << "\n";
        out << "commutator scale: " << fmt12(rot.gamma_scale) << "\n";
        out << "K before: [" << fmt12(rot.k_before(0, 0)) << " " << fmt12(rot.k_before(0, 1))
            << "; " << fmt12(rot.k_before(1, 0)) << " " << fmt12(rot.k_before(1, 1)) << "]\n";
        out << "K after:  [" << fmt12(rot.k_after(0, 0)) << " " << fmt12(rot.k_after(0, 1))
            << "; " << fmt12(rot.k_after(1, 0)) << " " << fmt12(rot.k_after(1, 1)) << "]\n";
        out << "scalar product bound before: lhs " << fmt12(rot.scalar_before.lhs) << " >= rhs "
            << fmt12(rot.scalar_before.rhs) << "  "
            << (rot.scalar_before.holds ? "HOLDS" : "VIOLATED") << "\n";
        out << "rotated scalar form (as published): lhs " << fmt12(rot.rotated_scalar.lhs)
            << " >= rhs " << fmt12(rot.rotated_scalar.rhs) << "  "
            << (rot.rotated_scalar.holds ? "HOLDS" : "VIOLATED") << "\n";
        out << "matrix bound before: " << (rot.matrix_before.is_psd ? "HOLDS" : "VIOLATED")
            << " (min eigenvalue " << fmt12(rot.matrix_before.min_eigenvalue) << ")\n";
        out << "matrix bound after:  " << (rot.matrix_after.is_psd ? "HOLDS" : "VIOLATED")
            << " (min eigenvalue " << fmt12(rot.matrix_after.min_eigenvalue) << ")\n";
        if (random_s > 0)
            out << "random congruences: " << random_s << " (seed " << seed
                << "), verdict flips " << flips << ", max min-eigenvalue change "
                << fmt12(max_margin_change) << "\n";
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"numerical certification of measurement uncertainty relations"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    std::string format = "text";
    std::optional<double> cli_tol;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option_function<double>(
               "--tol",
               [&cli_tol](double v) {
                   if (!std::isfinite(v) || v <= 0.0)
                       throw CLI::ValidationError("--tol must be a positive number");
                   cli_tol = v;
               },
               "override all tolerance thresholds");
    };

    auto* c_analyze = app.add_subcommand("analyze", "analyze a model file");
    std::string analyze_file;
    c_analyze->add_option("file", analyze_file, "model file (JSON)")->required();
    add_common(c_analyze);

    auto* c_example = app.add_subcommand("example", "analyze a built-in model");
    std::string example_name;
    double gain = 1.0;
    std::string emit_model_path;
    c_example->add_option("name", example_name, "bae, identity, or cnot")->required();
    auto* gain_opt = c_example->add_option("--gain", gain, "amplifier gain (bae only)");
    c_example->add_option("--emit-model", emit_model_path, "write the model file here");
    add_common(c_example);

    auto* c_sweep = app.add_subcommand("sweep", "analyze a built-in model across a parameter");
    std::string sweep_name, sweep_param = "gain";
    double sweep_min = 0.0, sweep_max = 0.0;
    int sweep_steps = 0;
    c_sweep->add_option("name", sweep_name, "built-in model name")->required();
    c_sweep->add_option("--param", sweep_param, "parameter to sweep")->required();
    c_sweep->add_option("--min", sweep_min, "first value")->required();
    c_sweep->add_option("--max", sweep_max, "last value")->required();
    c_sweep->add_option("--steps", sweep_steps, "number of points")->required();
    add_common(c_sweep);

    auto* c_fuzz = app.add_subcommand("fuzz", "random-model campaign");
    std::string fuzz_backend;
    std::string fuzz_dims = "2x2";
    int fuzz_modes = 1;
    int fuzz_trials = 100;
    int fuzz_pairs = 1;
    std::optional<std::uint64_t> fuzz_seed;
    c_fuzz->add_option("--backend", fuzz_backend, "finite or gaussian")
        ->required()
        ->check(CLI::IsMember({"finite", "gaussian"}));
    c_fuzz->add_option("--dims", fuzz_dims, "object x probe dimensions, e.g. 3x4 (finite)");
    c_fuzz->add_option("--modes", fuzz_modes, "modes per side (gaussian)");
    c_fuzz->add_option("--trials", fuzz_trials, "number of models")->required();
    c_fuzz->add_option("--pairs", fuzz_pairs, "measured pairs per model");
    c_fuzz->add_option_function<std::uint64_t>(
        "--seed", [&fuzz_seed](std::uint64_t s) { fuzz_seed = s; },
        "campaign seed (generated and echoed when absent)");
    add_common(c_fuzz);

    auto* c_cov = app.add_subcommand("covariance", "noise-disturbance frame rotation");
    std::string cov_file;
    double cov_angle = std::atan(1.0); // pi/4
    int cov_random_s = 0;
    std::uint64_t cov_seed = 1;
    c_cov->add_option("file", cov_file, "model file (JSON)")->required();
    c_cov->add_option("--angle", cov_angle, "rotation angle in radians (default pi/4)");
    c_cov->add_option("--random-s", cov_random_s, "additionally try N random congruences");
    c_cov->add_option("--seed", cov_seed, "seed for the random congruences");
    add_common(c_cov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << app.version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*c_analyze)
            return cmd_analyze(analyze_file, format, cli_tol, out);
        if (*c_example)
            return cmd_example(example_name, gain, gain_opt->count() > 0, emit_model_path,
                               format, cli_tol, out);
        if (*c_sweep)
            return cmd_sweep(sweep_name, sweep_param, sweep_min, sweep_max, sweep_steps, format,
                             cli_tol, out);
        if (*c_fuzz) {
            FuzzConfig config;
            config.backend =
                fuzz_backend == "finite" ? FuzzBackend::finite : FuzzBackend::gaussian;
            if (config.backend == FuzzBackend::finite) {
                auto x = fuzz_dims.find('x');
                if (x == std::string::npos)
                    throw DomainError("--dims must look like 3x4");
                try {
                    config.object_dim = std::stoi(fuzz_dims.substr(0, x));
                    config.probe_dim = std::stoi(fuzz_dims.substr(x + 1));
                } catch (const std::exception&) {
                    throw DomainError("--dims must look like 3x4");
                }
                if (config.object_dim < 2 || config.probe_dim < 2)
                    throw DomainError("--dims components must be >= 2");
            } else {
                if (fuzz_modes < 1)
                    throw DomainError("--modes must be >= 1");
                config.object_modes = config.probe_modes = fuzz_modes;
            }
            if (fuzz_trials < 0)
                throw DomainError("--trials must be >= 0");
            config.trials = fuzz_trials;
            if (fuzz_pairs < 1)
                throw DomainError("--pairs must be >= 1");
            config.n = fuzz_pairs;
            if (!fuzz_seed) {
                std::random_device rd;
                fuzz_seed = (std::uint64_t(rd()) << 32) ^ rd();
            }
            config.seed = *fuzz_seed;
            config.tol = resolve_tolerances(cli_tol, std::nullopt);
            // campaigns default to json so the replay models survive
            std::string fuzz_format = c_fuzz->count("--format") > 0 ? format : "json";
            return cmd_fuzz(config, fuzz_format, out);
        }
        if (*c_cov)
            return cmd_covariance(cov_file, cov_angle, cov_random_s, cov_seed, format, cli_tol,
                                  out);
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no command\n";
    return 1;
}

} // namespace ur
