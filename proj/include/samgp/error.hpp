#pragma once

#include <stdexcept>
#include <string>

namespace samgp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// malformed or unreadable input files
struct IngestionError : Error {
    using Error::Error;
};

// malformed trees, out-of-range variable indices, bad s-expressions
struct StructuralError : Error {
    using Error::Error;
};

// caller violated an operation precondition
struct ContractError : Error {
    using Error::Error;
};

// invalid experiment configuration; message lists every problem found
struct ConfigError : Error {
    using Error::Error;
};

// non-finite features or a failed solve while evaluating an individual
struct EvaluationError : Error {
    using Error::Error;
};

} // namespace samgp
