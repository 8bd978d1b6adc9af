#pragma once

#include <stdexcept>
#include <string>

namespace warpstab {

// Base for every error raised by the library. The lab maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// s at or below the horizon of a static model.
class HorizonError : public DomainError {
public:
    using DomainError::DomainError;
};

class SingularError : public Error {
public:
    using Error::Error;
};

class ExtrapolationError : public Error {
public:
    using Error::Error;
};

class HypothesisError : public Error {
public:
    HypothesisError(const std::string& what, double margin)
        : Error(what + " (margin " + std::to_string(margin) + ")"), margin_(margin) {}
    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

// Flow guards: parabolicity / mean convexity / domain exit.
class GuardError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

} // namespace warpstab
