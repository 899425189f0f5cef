#pragma once

#include <stdexcept>
#include <string>

namespace amm {

// Base of everything thrown by this library.  Two broad categories so the CLI
// can map them onto distinct exit codes: InputError for malformed or
// out-of-contract inputs, NumericError for computations that cannot be
// completed (failed brackets, non-invertible targets, ...).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InputError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// --- profile / ladder loading ---
struct EmptyLadder : InputError { using InputError::InputError; };
struct NegativeLiquidity : InputError { using InputError::InputError; };
struct NonPositivePrice : InputError { using InputError::InputError; };
struct UnboundedSupport : InputError { using InputError::InputError; };
struct DegenerateCurvature : InputError { using InputError::InputError; };
struct BadInterval : InputError { using InputError::InputError; };

// --- curves ---
struct OutsideSupport : InputError { using InputError::InputError; };
struct NotInvertible : NumericError { using NumericError::NumericError; };

// --- payoff ---
struct BadRange : InputError { using InputError::InputError; };
struct AtomAtPrice : InputError { using InputError::InputError; };

// --- models / data ---
struct BadInput : InputError { using InputError::InputError; };
struct NegativeSynthetic : NumericError { using NumericError::NumericError; };
struct TooFewQuotes : InputError { using InputError::InputError; };
struct InvariantViolation : NumericError { using NumericError::NumericError; };
struct SchemaError : InputError { using InputError::InputError; };
struct NetworkError : Error { using Error::Error; };

// --- pricing / implied ---
struct CoverageGap : InputError { using InputError::InputError; };
struct NotTickAligned : InputError { using InputError::InputError; };
struct BelowIntrinsic : NumericError { using NumericError::NumericError; };
struct NoBracket : NumericError { using NumericError::NumericError; };

// --- exit ---
struct NotUpwardTransient : InputError { using InputError::InputError; };
struct YInversionOutOfRange : NumericError { using NumericError::NumericError; };

} // namespace amm
