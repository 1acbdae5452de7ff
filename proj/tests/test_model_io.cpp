#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "ur/builtin_models.hpp"
#include "ur/measurement.hpp"
#include "ur/model_io.hpp"

using Catch::Approx;
using namespace ur;

namespace {

std::string repo_path(const char* rel) {
    return std::string(UR_REPO_DIR) + "/" + rel;
}

// analyze twice and compare the physically meaningful numbers
void require_same_physics(const MeasurementModel& a, const MeasurementModel& b) {
    UncertaintyReport ra = analyze(a), rb = analyze(b);
    REQUIRE(ra.backend == rb.backend);
    REQUIRE(ra.n == rb.n);
    REQUIRE((ra.k_matrix - rb.k_matrix).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((ra.gamma - rb.gamma).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((ra.g_exp - rb.g_exp).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(ra.matrix_oup.is_psd == rb.matrix_oup.is_psd);
    REQUIRE(ra.matrix_oup.min_eigenvalue == Approx(rb.matrix_oup.min_eigenvalue).margin(1e-12));
}

} // namespace

TEST_CASE("finite model round trip") {
    for (const FiniteMeasurementModel& m : {make_identity_model(), make_cnot_model()}) {
        Json j = serialize_model(m);
        ParsedModelFile parsed = parse_model(j);
        require_same_physics(m, parsed.model);
        REQUIRE_FALSE(parsed.tolerances.has_value());
        REQUIRE_FALSE(parsed.seed.has_value());
    }
}

TEST_CASE("gaussian model round trip") {
    GaussianMeasurementModel m = bae_model(2.5);
    Json j = serialize_model(m);
    ParsedModelFile parsed = parse_model(j);
    require_same_physics(m, parsed.model);

    const auto* g = std::get_if<GaussianMeasurementModel>(&parsed.model);
    REQUIRE(g != nullptr);
    REQUIRE(g->comm_constant == Approx(0.5));
    REQUIRE((g->channel - m.channel).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((g->probe_moments.cov - m.probe_moments.cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("text round trip with tolerances and seed") {
    Json j = serialize_model(make_identity_model());
    j["tolerances"] = Json{{"psd", 1e-8}};
    j["seed"] = 12345;
    ParsedModelFile parsed = parse_model_text(j.dump());
    REQUIRE(parsed.tolerances.has_value());
    REQUIRE(parsed.tolerances->psd == Approx(1e-8));
    REQUIRE(parsed.tolerances->hermitian == Approx(1e-10)); // untouched default
    REQUIRE(parsed.seed.has_value());
    REQUIRE(*parsed.seed == 12345);

    Json again = serialize_model_file(parsed);
    REQUIRE(again["seed"].get<std::uint64_t>() == 12345);
    REQUIRE(parse_model(again).tolerances->psd == Approx(1e-8));
}

TEST_CASE("schema errors carry the offending field path") {
    Json good = serialize_model(make_identity_model());

    auto path_of = [](const Json& j) -> std::string {
        try {
            parse_model(j);
        } catch (const SchemaError& e) {
            return e.path;
        }
        return "<no error>";
    };

    Json j = good;
    j.erase("schema");
    REQUIRE(path_of(j) == "schema");

    j = good;
    j["schema"] = 7;
    REQUIRE(path_of(j) == "schema");

    j = good;
    j["backend"] = "weird";
    REQUIRE(path_of(j) == "backend");

    j = good;
    j.erase("observables");
    REQUIRE(path_of(j) == "observables");

    j = good;
    j["observables"].erase("A");
    REQUIRE(path_of(j) == "observables.A");

    j = good;
    j["observables"]["A"][0][0] = Json::array({1.0}); // not [re, im]
    REQUIRE(path_of(j) == "observables.A[0][0][0]");

    j = good;
    j["object"]["dim"] = 1;
    REQUIRE(path_of(j) == "object.dim");

    j = good;
    j["object"]["state"]["kind"] = "thermal";
    REQUIRE(path_of(j) == "object.state.kind");

    j = good;
    j["object"]["state"]["vector"] = Json::array(
        {Json::array({1.0, 0.0}), Json::array({0.0, 0.0}), Json::array({0.0, 0.0})});
    REQUIRE(path_of(j) == "object.state.vector");

    j = good;
    j["interaction"].erase("unitary");
    REQUIRE(path_of(j) == "interaction.unitary");
}

TEST_CASE("gaussian schema errors") {
    Json good = serialize_model(bae_model(1.0));

    Json j = good;
    j["comm_constant"] = -0.5;
    REQUIRE_THROWS_AS(parse_model(j), SchemaError);

    j = good;
    j["object"]["modes"] = 0;
    REQUIRE_THROWS_AS(parse_model(j), SchemaError);

    j = good;
    j["object"]["moments"].erase("cov");
    REQUIRE_THROWS_AS(parse_model(j), SchemaError);
}

TEST_CASE("semantic violations surface through parsing") {
    Json j = serialize_model(make_identity_model());
    j["object"]["state"]["vector"] = Json::array(
        {Json::array({1.0, 0.0}), Json::array({1.0, 0.0})}); // unnormalized
    REQUIRE_THROWS_AS(parse_model(j), SchemaError);
}

TEST_CASE("tolerance block validation") {
    REQUIRE_THROWS_AS(tolerances_from_json(Json{{"psd", 0.0}}, "tolerances"), SchemaError);
    REQUIRE_THROWS_AS(tolerances_from_json(Json{{"psd", -1e-9}}, "tolerances"), SchemaError);
    REQUIRE_THROWS_AS(tolerances_from_json(Json{{"wibble", 1e-9}}, "tolerances"), SchemaError);
    REQUIRE_THROWS_AS(tolerances_from_json(Json{{"max_composite_dim", 2}}, "tolerances"),
                      SchemaError);

    Tolerances t = tolerances_from_json(
        Json{{"hermitian", 1e-7}, {"max_composite_dim", 64}}, "tolerances");
    REQUIRE(t.hermitian == Approx(1e-7));
    REQUIRE(t.max_composite_dim == 64);
    REQUIRE(t.psd == Approx(1e-10));

    Json round = tolerances_to_json(t);
    Tolerances t2 = tolerances_from_json(round, "tolerances");
    REQUIRE(t2.hermitian == Approx(1e-7));
    REQUIRE(t2.max_composite_dim == 64);
}

TEST_CASE("invalid json text is a schema error") {
    REQUIRE_THROWS_AS(parse_model_text("{ not json"), SchemaError);
    REQUIRE_THROWS_AS(parse_model_text("[1, 2, 3]"), SchemaError);
}

TEST_CASE("missing file is an input error") {
    REQUIRE_THROWS_AS(load_model_file("/nonexistent/path.json"), Error);
}

TEST_CASE("shipped model files parse and analyze") {
    ParsedModelFile bae = load_model_file(repo_path("models/bae.json"));
    UncertaintyReport rb = analyze(bae.model);
    REQUIRE(rb.backend == "gaussian");
    REQUIRE_FALSE(rb.matrix_oup.is_psd);
    REQUIRE(rb.matrix_oup.determinant == Approx(-0.25).margin(1e-12));

    ParsedModelFile idm = load_model_file(repo_path("models/identity.json"));
    REQUIRE(analyze(idm.model).all_hold);

    ParsedModelFile cnot = load_model_file(repo_path("models/cnot.json"));
    UncertaintyReport rc = analyze(cnot.model);
    REQUIRE(rc.eta[0] == Approx(std::sqrt(2.0)));
    REQUIRE(rc.all_hold);
}
