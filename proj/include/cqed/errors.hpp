// errors.hpp: error categories shared by the library and the CLI front end

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqed {

// Each category maps onto one CLI exit status.
enum class ErrorCategory { config, convergence, solver, io };

inline int exit_code(ErrorCategory c) noexcept {
    switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::convergence: return 3;
    case ErrorCategory::solver: return 4;
    case ErrorCategory::io: return 5;
    }
    return 1;
}

inline const char* category_name(ErrorCategory c) noexcept {
    switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::solver: return "solver";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Violated precondition: bad dimension, wrong operator kind for a site,
// nonpositive frequency, ...
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what)
        : Error(ErrorCategory::config, what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what)
        : Error(ErrorCategory::convergence, what) {}
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what)
        : Error(ErrorCategory::solver, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(ErrorCategory::config,
                "line " + std::to_string(line) + ", column " + std::to_string(column) +
                    ": " + what),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace cqed
