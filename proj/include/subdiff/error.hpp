#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subdiff {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not certify its accuracy target.
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// Non-finite coefficient or data sample met during assembly.
class AssemblyError : public Error {
public:
    AssemblyError(const std::string& what, std::size_t element)
        : Error(what + " (element " + std::to_string(element) + ")"), element_(element) {}

    std::size_t element() const noexcept { return element_; }

private:
    std::size_t element_;
};

/// Zero or negative pivot in a symmetric tridiagonal factorization.
class NotSpdError : public Error {
public:
    NotSpdError(const std::string& what, std::size_t row)
        : Error(what + " (pivot row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Time marching produced a non-finite or out-of-band state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Requested number of time steps exceeds the global cap.
class StepCapError : public Error {
public:
    using Error::Error;
};

/// Unknown problem identifier.
class UnknownProblem : public Error {
public:
    using Error::Error;
};

}  // namespace subdiff
