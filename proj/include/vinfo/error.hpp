#pragma once

#include <stdexcept>
#include <string>

namespace vinfo {

// Base of every error the library throws. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data: bad ids, unknown labels, schema violations.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Invalid combination of options (overlapping field lists, bad family spec...).
class ConfigError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

// A statistic that has no value for the given input (empty group, zero variance).
class UndefinedError : public Error {
public:
    using Error::Error;
};

}  // namespace vinfo
