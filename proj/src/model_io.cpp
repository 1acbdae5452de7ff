#include "ur/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ur {

namespace {

std::string idx(const std::string& path, size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

const Json& require_key(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object())
        throw SchemaError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw SchemaError(path.empty() ? std::string(key) : path + "." + key, "missing");
    return *it;
}

double as_number(const Json& j, const std::string& path) {
    if (!j.is_number())
        throw SchemaError(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v))
        throw SchemaError(path, "must be finite");
    return v;
}

std::int64_t as_integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer())
        throw SchemaError(path, "expected an integer");
    return j.get<std::int64_t>();
}

Complex as_complex(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(path, "expected [re, im]");
    return Complex(as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"));
}

Eigen::VectorXcd as_complex_vector(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw SchemaError(path, "expected a non-empty array");
    Eigen::VectorXcd v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v(i) = as_complex(j[i], idx(path, i));
    return v;
}

Eigen::MatrixXcd as_complex_matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw SchemaError(path, "expected a non-empty array of rows");
    size_t rows = j.size();
    size_t cols = 0;
    Eigen::MatrixXcd m;
    for (size_t r = 0; r < rows; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.empty())
            throw SchemaError(idx(path, r), "expected a non-empty row");
        if (r == 0) {
            cols = row.size();
            m.resize(rows, cols);
        } else if (row.size() != cols) {
            throw SchemaError(idx(path, r), "row length differs from row 0");
        }
        for (size_t c = 0; c < cols; ++c)
            m(r, c) = as_complex(row[c], idx(idx(path, r), c));
    }
    return m;
}

Eigen::VectorXd as_real_vector(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw SchemaError(path, "expected a non-empty array");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v(i) = as_number(j[i], idx(path, i));
    return v;
}

Eigen::MatrixXd as_real_matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw SchemaError(path, "expected a non-empty array of rows");
    size_t rows = j.size();
    size_t cols = 0;
    Eigen::MatrixXd m;
    for (size_t r = 0; r < rows; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.empty())
            throw SchemaError(idx(path, r), "expected a non-empty row");
        if (r == 0) {
            cols = row.size();
            m.resize(rows, cols);
        } else if (row.size() != cols) {
            throw SchemaError(idx(path, r), "row length differs from row 0");
        }
        for (size_t c = 0; c < cols; ++c)
            m(r, c) = as_number(row[c], idx(idx(path, r), c));
    }
    return m;
}

QuantumState parse_state(const Json& j, Eigen::Index dim, const std::string& path,
                         const Tolerances& tol) {
    const Json& kind = require_key(j, "kind", path);
    if (!kind.is_string())
        throw SchemaError(path + ".kind", "expected \"pure\" or \"density\"");
    std::string k = kind.get<std::string>();
    try {
        if (k == "pure") {
            Eigen::VectorXcd v = as_complex_vector(require_key(j, "vector", path),
                                                   path + ".vector");
            if (v.size() != dim)
                throw SchemaError(path + ".vector", "expected length " + std::to_string(dim));
            return QuantumState::pure(std::move(v), tol);
        }
        if (k == "density") {
            Eigen::MatrixXcd m = as_complex_matrix(require_key(j, "matrix", path),
                                                   path + ".matrix");
            if (m.rows() != dim || m.cols() != dim)
                throw SchemaError(path + ".matrix", "expected " + std::to_string(dim) + "x" +
                                                        std::to_string(dim));
            return QuantumState::density(std::move(m), tol);
        }
    } catch (const ContractViolation& e) {
        throw SchemaError(path, e.what());
    }
    throw SchemaError(path + ".kind", "expected \"pure\" or \"density\"");
}

std::vector<Operator> parse_operator_list(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw SchemaError(path, "expected a non-empty array of matrices");
    std::vector<Operator> out;
    for (size_t i = 0; i < j.size(); ++i) {
        Eigen::MatrixXcd m = as_complex_matrix(j[i], idx(path, i));
        if (m.rows() != m.cols())
            throw SchemaError(idx(path, i), "matrix must be square");
        out.emplace_back(std::move(m));
    }
    return out;
}

std::vector<LinearObservable> parse_observable_list(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw SchemaError(path, "expected a non-empty array of observables");
    std::vector<LinearObservable> out;
    for (size_t i = 0; i < j.size(); ++i) {
        const Json& o = j[i];
        LinearObservable lo;
        lo.coeffs = as_real_vector(require_key(o, "coeffs", idx(path, i)),
                                   idx(path, i) + ".coeffs");
        if (o.contains("offset"))
            lo.offset = as_number(o["offset"], idx(path, i) + ".offset");
        out.push_back(std::move(lo));
    }
    return out;
}

GaussianMoments parse_moments(const Json& j, const std::string& path) {
    GaussianMoments m;
    m.mean = as_real_vector(require_key(j, "mean", path), path + ".mean");
    m.cov = as_real_matrix(require_key(j, "cov", path), path + ".cov");
    if (m.cov.rows() != m.mean.size() || m.cov.cols() != m.mean.size())
        throw SchemaError(path + ".cov", "expected " + std::to_string(m.mean.size()) + "x" +
                                             std::to_string(m.mean.size()));
    return m;
}

ParsedModelFile parse_finite(const Json& j, const Tolerances& tol) {
    const Json& object = require_key(j, "object", "");
    const Json& probe = require_key(j, "probe", "");
    Eigen::Index d_o = as_integer(require_key(object, "dim", "object"), "object.dim");
    Eigen::Index d_p = as_integer(require_key(probe, "dim", "probe"), "probe.dim");
    if (d_o < 2)
        throw SchemaError("object.dim", "must be >= 2");
    if (d_p < 2)
        throw SchemaError("probe.dim", "must be >= 2");

    const Json& obs = require_key(j, "observables", "");
    std::vector<Operator> a = parse_operator_list(require_key(obs, "A", "observables"),
                                                  "observables.A");
    std::vector<Operator> b = parse_operator_list(require_key(obs, "B", "observables"),
                                                  "observables.B");
    std::vector<Operator> m = parse_operator_list(require_key(obs, "M", "observables"),
                                                  "observables.M");

    const Json& inter = require_key(j, "interaction", "");
    Eigen::MatrixXcd u = as_complex_matrix(require_key(inter, "unitary", "interaction"),
                                           "interaction.unitary");
    if (u.rows() != d_o * d_p)
        throw SchemaError("interaction.unitary",
                          "expected dimension " + std::to_string(d_o * d_p));

    ParsedModelFile out{
        .model = FiniteMeasurementModel{
            .object_state = parse_state(require_key(object, "state", "object"), d_o,
                                        "object.state", tol),
            .probe_state = parse_state(require_key(probe, "state", "probe"), d_p, "probe.state",
                                       tol),
            .a_obs = std::move(a),
            .b_obs = std::move(b),
            .m_obs = std::move(m),
            .interaction = Operator(std::move(u))},
        .tolerances = {},
        .seed = {}};
    return out;
}

ParsedModelFile parse_gaussian(const Json& j) {
    const Json& object = require_key(j, "object", "");
    const Json& probe = require_key(j, "probe", "");
    GaussianMeasurementModel m;
    m.object_modes = int(as_integer(require_key(object, "modes", "object"), "object.modes"));
    m.probe_modes = int(as_integer(require_key(probe, "modes", "probe"), "probe.modes"));
    if (m.object_modes < 1)
        throw SchemaError("object.modes", "must be >= 1");
    if (m.probe_modes < 1)
        throw SchemaError("probe.modes", "must be >= 1");
    m.comm_constant = as_number(require_key(j, "comm_constant", ""), "comm_constant");
    if (m.comm_constant <= 0.0)
        throw SchemaError("comm_constant", "must be positive");

    const Json& obs = require_key(j, "observables", "");
    m.a_obs = parse_observable_list(require_key(obs, "A", "observables"), "observables.A");
    m.b_obs = parse_observable_list(require_key(obs, "B", "observables"), "observables.B");
    m.m_obs = parse_observable_list(require_key(obs, "M", "observables"), "observables.M");

    const Json& inter = require_key(j, "interaction", "");
    m.channel = as_real_matrix(require_key(inter, "channel", "interaction"),
                               "interaction.channel");

    m.object_moments = parse_moments(require_key(object, "moments", "object"), "object.moments");
    m.probe_moments = parse_moments(require_key(probe, "moments", "probe"), "probe.moments");
    return ParsedModelFile{.model = std::move(m), .tolerances = {}, .seed = {}};
}

Json complex_to_json(Complex c) {
    return Json::array({c.real(), c.imag()});
}

Json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json real_vector_to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

Json real_matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json state_to_json(const QuantumState& s) {
    Json out;
    if (s.kind() == QuantumState::Kind::pure) {
        out["kind"] = "pure";
        Json v = Json::array();
        for (Eigen::Index i = 0; i < s.vector().size(); ++i)
            v.push_back(complex_to_json(s.vector()(i)));
        out["vector"] = std::move(v);
    } else {
        out["kind"] = "density";
        out["matrix"] = complex_matrix_to_json(s.density_matrix());
    }
    return out;
}

Json serialize_finite(const FiniteMeasurementModel& m) {
    Json j;
    j["schema"] = 1;
    j["backend"] = "finite";
    j["object"] = Json{{"dim", m.object_state.dim()}, {"state", state_to_json(m.object_state)}};
    j["probe"] = Json{{"dim", m.probe_state.dim()}, {"state", state_to_json(m.probe_state)}};
    Json obs;
    auto ops_to_json = [](const std::vector<Operator>& v) {
        Json out = Json::array();
        for (const auto& op : v)
            out.push_back(complex_matrix_to_json(op.entries()));
        return out;
    };
    obs["A"] = ops_to_json(m.a_obs);
    obs["B"] = ops_to_json(m.b_obs);
    obs["M"] = ops_to_json(m.m_obs);
    j["observables"] = std::move(obs);
    j["interaction"] = Json{{"unitary", complex_matrix_to_json(m.interaction.entries())}};
    return j;
}

Json serialize_gaussian(const GaussianMeasurementModel& m) {
    Json j;
    j["schema"] = 1;
    j["backend"] = "gaussian";
    j["comm_constant"] = m.comm_constant;
    j["object"] = Json{{"modes", m.object_modes},
                       {"moments", Json{{"mean", real_vector_to_json(m.object_moments.mean)},
                                        {"cov", real_matrix_to_json(m.object_moments.cov)}}}};
    j["probe"] = Json{{"modes", m.probe_modes},
                      {"moments", Json{{"mean", real_vector_to_json(m.probe_moments.mean)},
                                       {"cov", real_matrix_to_json(m.probe_moments.cov)}}}};
    Json obs;
    auto obs_to_json = [](const std::vector<LinearObservable>& v) {
        Json out = Json::array();
        for (const auto& o : v)
            out.push_back(Json{{"coeffs", real_vector_to_json(o.coeffs)}, {"offset", o.offset}});
        return out;
    };
    obs["A"] = obs_to_json(m.a_obs);
    obs["B"] = obs_to_json(m.b_obs);
    obs["M"] = obs_to_json(m.m_obs);
    j["observables"] = std::move(obs);
    j["interaction"] = Json{{"channel", real_matrix_to_json(m.channel)}};
    return j;
}

} // namespace

Tolerances tolerances_from_json(const Json& j, const std::string& path) {
    if (!j.is_object())
        throw SchemaError(path, "expected an object");
    Tolerances tol;
    auto grab = [&](const char* key, double& slot) {
        if (j.contains(key)) {
            slot = as_number(j[key], path + "." + key);
            if (slot <= 0.0)
                throw SchemaError(path + "." + key, "must be positive");
        }
    };
    grab("hermitian", tol.hermitian);
    grab("unitary", tol.unitary);
    grab("norm", tol.norm);
    grab("psd", tol.psd);
    if (j.contains("max_composite_dim")) {
        std::int64_t d = as_integer(j["max_composite_dim"], path + ".max_composite_dim");
        if (d < 4)
            throw SchemaError(path + ".max_composite_dim", "must be >= 4");
        tol.max_composite_dim = d;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string k = it.key();
        if (k != "hermitian" && k != "unitary" && k != "norm" && k != "psd" &&
            k != "max_composite_dim")
            throw SchemaError(path + "." + k, "unknown tolerance");
    }
    return tol;
}

Json tolerances_to_json(const Tolerances& tol) {
    Json j;
    j["hermitian"] = tol.hermitian;
    j["unitary"] = tol.unitary;
    j["norm"] = tol.norm;
    j["psd"] = tol.psd;
    j["max_composite_dim"] = tol.max_composite_dim;
    return j;
}

ParsedModelFile parse_model(const Json& j) {
    if (!j.is_object())
        throw SchemaError("", "model file must be a JSON object");
    std::int64_t schema = as_integer(require_key(j, "schema", ""), "schema");
    if (schema != 1)
        throw SchemaError("schema", "unsupported version " + std::to_string(schema) +
                                        ", this tool reads version 1");
    const Json& backend = require_key(j, "backend", "");
    if (!backend.is_string())
        throw SchemaError("backend", "expected \"finite\" or \"gaussian\"");
    std::string b = backend.get<std::string>();

    std::optional<Tolerances> tol;
    if (j.contains("tolerances"))
        tol = tolerances_from_json(j["tolerances"], "tolerances");
    Tolerances effective = tol.value_or(Tolerances{});

    ParsedModelFile out = [&] {
        if (b == "finite")
            return parse_finite(j, effective);
        if (b == "gaussian")
            return parse_gaussian(j);
        throw SchemaError("backend", "expected \"finite\" or \"gaussian\", got \"" + b + "\"");
    }();
    out.tolerances = tol;
    if (j.contains("seed")) {
        std::int64_t s = as_integer(j["seed"], "seed");
        if (s < 0)
            throw SchemaError("seed", "must be non-negative");
        out.seed = std::uint64_t(s);
    }
    return out;
}

ParsedModelFile parse_model_text(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw SchemaError("", "not valid JSON");
    return parse_model(j);
}

ParsedModelFile load_model_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in)
        throw Error("cannot open model file '" + filename + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_text(ss.str());
}

Json serialize_model(const MeasurementModel& model) {
    return std::visit(
        [](const auto& m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FiniteMeasurementModel>)
                return serialize_finite(m);
            else
                return serialize_gaussian(m);
        },
        model);
}

Json serialize_model_file(const ParsedModelFile& file) {
    Json j = serialize_model(file.model);
    if (file.tolerances)
        j["tolerances"] = tolerances_to_json(*file.tolerances);
    if (file.seed)
        j["seed"] = *file.seed;
    return j;
}

} // namespace ur
