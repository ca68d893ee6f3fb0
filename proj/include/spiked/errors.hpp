#pragma once

#include <stdexcept>
#include <string>

namespace spiked {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

// Raised when a contour fails a geometric validity check.
struct InvalidContourError : Error {
    using Error::Error;
};

struct KernelEvaluationError : Error {
    KernelEvaluationError(const std::string& what, int row, int col)
        : Error(what + " at node (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
          row(row), col(col) {}
    int row;
    int col;
};

struct SingularityError : Error {
    SingularityError(const std::string& what, double condition)
        : Error(what), condition(condition) {}
    double condition;
};

struct ScaledDeterminantError : Error {
    ScaledDeterminantError(const std::string& what, double log_abs_det)
        : Error(what), log_abs_det(log_abs_det) {}
    double log_abs_det;
};

struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double estimate)
        : Error(what), estimate(estimate) {}
    double estimate;
};

struct NumericalFailure : Error {
    using Error::Error;
};

struct ThresholdViolation : Error {
    using Error::Error;
};

struct NotSeparatedError : Error {
    using Error::Error;
};

struct UnpairedSamplesError : Error {
    using Error::Error;
};

struct OutOfScaleError : Error {
    using Error::Error;
};

struct RegimeMismatchError : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

struct OutputExistsError : Error {
    using Error::Error;
};

}  // namespace spiked
