#pragma once

#include <optional>
#include <string>

#include "ur/model_io.hpp"

namespace ur {

// Everything a CLI invocation emits for one analyzed model: the verdicts,
// the model echo with resolved defaults, and bookkeeping.
struct ReportDocument {
    MeasurementModel model;
    Tolerances tolerances;
    std::optional<std::uint64_t> seed;
    UncertaintyReport report;
    double duration_seconds = 0.0;
};

Json report_to_json(const ReportDocument& doc);
std::string report_to_text(const ReportDocument& doc);

// 12-significant-digit rendering used by all text output.
std::string fmt12(double v);

} // namespace ur
