#pragma once

#include <stdexcept>
#include <string>

namespace legalir {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data; message carries file/line position when known.
class ParseError : public Error {
public:
    using Error::Error;
};

// Corpus-level invariant violation (duplicate ids, unresolved references).
class CorpusError : public Error {
public:
    using Error::Error;
};

// Caller passed an invalid argument (empty input, k < 1, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Numeric value outside its documented range.
class RangeError : public Error {
public:
    using Error::Error;
};

// Lookup of an unknown id.
class LookupError : public Error {
public:
    using Error::Error;
};

// Object used before it was fitted/initialized.
class StateError : public Error {
public:
    using Error::Error;
};

// Training preconditions violated (e.g. single-class input).
class TrainingError : public Error {
public:
    using Error::Error;
};

// Configuration file problems.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem / stream failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace legalir
