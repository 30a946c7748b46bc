#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wmark {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Index out of range, non-watertight input and similar structural faults.
class StructureError : public Error {
public:
    using Error::Error;
};

class EmptyMeshError : public Error {
public:
    EmptyMeshError() : Error("mesh has no vertices") {}
    explicit EmptyMeshError(const std::string& what) : Error(what) {}
};

/// Degenerate geometry (zero extent, zero area, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Bad user-supplied parameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Boolean engine failure (inconsistent intersection, failed triangulation).
class CsgError : public Error {
public:
    using Error::Error;
};

/// Malformed or mismatched provenance sidecar.
class SidecarError : public Error {
public:
    using Error::Error;
};

}  // namespace wmark
