#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fcat {

class InvalidDimension : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LayoutMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised by integrators and solvers: step underflow, positivity loss, non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Diagnostic {
    std::string code;
    std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

inline void emit(Diagnostics* sink, std::string code, std::string message) {
    if (sink) sink->push_back({std::move(code), std::move(message)});
}

} // namespace fcat
