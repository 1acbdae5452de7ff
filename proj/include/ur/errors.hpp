#pragma once

#include <stdexcept>
#include <string>

namespace ur {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix/vector dimensions do not line up.
struct ShapeError : Error {
    using Error::Error;
};

// A declared property (hermitian, unitary, normalized, symplectic,
// commuting family, zero-Gamma premise, ...) fails its residual check.
struct ContractViolation : Error {
    using Error::Error;
};

// A quantity that must be real carries an imaginary part beyond tolerance.
struct ContaminationError : Error {
    using Error::Error;
};

// Composite dimension exceeds the configured ceiling.
struct ModelTooLargeError : Error {
    using Error::Error;
};

// A numeric argument is outside its admissible range (e.g. zero gain).
struct DomainError : Error {
    using Error::Error;
};

// Model file rejected; `path` points at the offending field.
struct SchemaError : Error {
    std::string path;
    SchemaError(std::string field_path, const std::string& what)
        : Error("model field '" + field_path + "': " + what), path(std::move(field_path)) {}
};

} // namespace ur
