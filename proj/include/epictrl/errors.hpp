#pragma once

#include <stdexcept>
#include <string>

namespace epictrl {

/// Root of every error the toolkit raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed weight archive (bad magic, version, shape or checksum).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV input (wrong header, bad field, non-contiguous days).
class SchemaMismatch : public Error {
public:
    using Error::Error;
};

class IntegrationDiverged : public Error {
public:
    using Error::Error;
};

class EpisodeFinished : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

class BufferTooSmall : public Error {
public:
    using Error::Error;
};

class CalibrationInfeasible : public Error {
public:
    using Error::Error;
};

} // namespace epictrl
