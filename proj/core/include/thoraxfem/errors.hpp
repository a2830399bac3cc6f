#pragma once

#include <stdexcept>
#include <string>

namespace tfem {

// Base for all engine errors. The CLI maps input/configuration errors to
// exit code 2 and numerical failures to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document (MSH, scenario JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

// Element type outside the supported set.
class UnsupportedElementError : public FormatError {
public:
    using FormatError::FormatError;
};

// Dangling references or inconsistent connectivity.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Invalid scenario configuration (unmapped region, empty patch, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Material parameters outside the admissible range.
class MaterialError : public Error {
public:
    using Error::Error;
};

// Degenerate geometry (zero-volume tet, collinear triangle).
class GeometryError : public Error {
public:
    using Error::Error;
};

// Iterative solver failure. The best iterate is preserved in the
// solver's result structure; this exception carries the context string.
class SolverError : public Error {
public:
    using Error::Error;
};

class ExportError : public Error {
public:
    using Error::Error;
};

} // namespace tfem
