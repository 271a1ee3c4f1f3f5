#pragma once

#include <stdexcept>
#include <string>

namespace ringcoord {

/// Adaptive quadrature failed to reach the requested tolerance. Signals a
/// geometry or tolerance bug rather than a recoverable condition.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// A census with zero total neighbors reached the mapper (protocol failure
/// upstream).
class EmptyCensusError : public std::invalid_argument {
public:
    explicit EmptyCensusError(const std::string& what) : std::invalid_argument(what) {}
};

/// Collision counting was asked about a node that has no coordinate.
class MissingCoordinateError : public std::runtime_error {
public:
    explicit MissingCoordinateError(const std::string& what) : std::runtime_error(what) {}
};

/// Plot emission could not find its input files.
class MissingDataError : public std::runtime_error {
public:
    explicit MissingDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed CSV input (bad header, metadata or field).
class CsvFormatError : public std::runtime_error {
public:
    explicit CsvFormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ringcoord
