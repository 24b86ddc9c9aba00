#pragma once

#include <stdexcept>
#include <string>

namespace lacc {

// All failures carry a short machine-readable kind ("NonHermitian",
// "SchemaError", ...) next to the human-readable message.  The three
// subclasses map onto the process exit codes used by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// Bad input: malformed files, invalid matrices, out-of-range arguments.  Exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Numerical self-check failed: non-convergent eigensolver, cross-route
// disagreement beyond statistical tolerance.  Exit code 3.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// A sampling or optimization budget was too small to produce a usable result.  Exit code 4.
class BudgetError : public Error {
public:
    using Error::Error;
};

}
