#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ur/measurement.hpp"

namespace ur {

using Json = nlohmann::ordered_json;

// Contents of a model file: the model itself plus optional per-file
// tolerance overrides and a fuzzing seed.
struct ParsedModelFile {
    MeasurementModel model;
    std::optional<Tolerances> tolerances;
    std::optional<std::uint64_t> seed;
};

// Throws SchemaError with the offending field path on malformed input.
ParsedModelFile parse_model(const Json& j);
ParsedModelFile parse_model_text(const std::string& text);
ParsedModelFile load_model_file(const std::string& filename);

Json serialize_model(const MeasurementModel& model);
Json serialize_model_file(const ParsedModelFile& file);

Json tolerances_to_json(const Tolerances& tol);
Tolerances tolerances_from_json(const Json& j, const std::string& path);

} // namespace ur
