// Error taxonomy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace calabi {

// Caller broke an operation contract (mismatched surface handles, fields of
// the wrong size, non-monotone time stamps, ...).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Operation is not defined for this surface topology.
struct UnsupportedOperation : std::logic_error {
    using std::logic_error::logic_error;
};

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Base for anything that can fail at runtime for numerical reasons.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A single flow step produced a non-finite field or an unsolvable system;
// the caller may retry with a smaller dt.
struct StepFailure : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

// dt underflowed while trying to recover from step failures.
struct StiffnessFailure : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

struct EigensolverFailure : NumericalFailure {
    EigensolverFailure(const std::string& msg, int iters)
        : NumericalFailure(msg), iterations(iters) {}
    int iterations = 0;
};

struct FitFailure : NumericalFailure {
    using NumericalFailure::NumericalFailure;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VersionMismatch : IoError {
    using IoError::IoError;
};

struct CorruptPayload : IoError {
    using IoError::IoError;
};

} // namespace calabi
