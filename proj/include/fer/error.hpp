#pragma once

#include <stdexcept>
#include <string>

namespace fer {

// Base class for all library errors.  exit_code() is the process exit status
// the CLI uses when the error escapes to main: 2 = bad configuration/usage,
// 3 = bad or missing data, 4 = numeric failure.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const { return 3; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 2; }
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

class WriteError : public Error {
public:
    using Error::Error;
};

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class PairingError : public Error {
public:
    using Error::Error;
};

class NoFaceFound : public Error {
public:
    using Error::Error;
};

class EmptySelection : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

} // namespace fer
