// errors.hpp: exception types shared by every module.
// Each error carries a kind that the command-line front end maps to an exit code.

#pragma once

#include <stdexcept>
#include <string>

namespace nmwalk {

enum class ErrorKind {
    config,      // malformed input or violated precondition on user parameters
    budget,      // numerical budget exhausted (step size, dimension, tail bound, boundary)
    degenerate,  // parameters at a singular point of the model
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::budget: return "budget";
        case ErrorKind::degenerate: return "degenerate";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what) : Error(ErrorKind::budget, what) {}
};

class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(ErrorKind::degenerate, what) {}
};

}  // namespace nmwalk
