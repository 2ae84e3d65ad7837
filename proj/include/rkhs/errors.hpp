#pragma once

#include <stdexcept>
#include <string>

namespace rkhs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside an operation's parameter domain (sigma out of range, nonpositive coefficient, ...).
class ParameterDomainError : public Error { using Error::Error; };
// Division by a zero leading coefficient.
class DivisionDomainError : public Error { using Error::Error; };
// Point outside the open ball.
class DomainError : public Error { using Error::Error; };
// Malformed or inconsistent arguments (bad shapes, mismatched sizes, ...).
class ArgumentError : public Error { using Error::Error; };
class OutOfRangeError : public Error { using Error::Error; };
class ShapeError : public ArgumentError { using ArgumentError::ArgumentError; };
class ImproperIdealError : public Error { using Error::Error; };
// "auto-nilpotent" requested on a tuple that is not jointly nilpotent.
class ModeError : public Error { using Error::Error; };
class CnpViolationError : public Error { using Error::Error; };
class DegeneracyError : public Error { using Error::Error; };
class FactorizationError : public Error { using Error::Error; };
class SingularKernelError : public Error { using Error::Error; };
class DegenerateSampleError : public Error { using Error::Error; };
// A mathematical precondition (positivity of 1/k(T,T*)) does not hold.
class PreconditionError : public Error { using Error::Error; };
class TruncationError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };

} // namespace rkhs
