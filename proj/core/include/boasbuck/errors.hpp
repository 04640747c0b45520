#pragma once

#include <stdexcept>
#include <string>

namespace boasbuck {

/// Base class for all library failures so callers can catch one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Series combined at different truncation orders.
class OrderMismatchError : public Error {
public:
    using Error::Error;
};

/// Composition inner series has a nonzero constant term.
class CompositionDomainError : public Error {
public:
    using Error::Error;
};

/// A kernel weight that must be nonnegative came out negative beyond tolerance.
class PositivityViolationError : public Error {
public:
    using Error::Error;
};

/// Weight tail failed to reach the requested mass within the index cap.
class TruncationFailureError : public Error {
public:
    using Error::Error;
};

/// Gamma/Beta argument at or beyond a pole.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Requested moment of the kernel does not exist.
class DivergentMomentError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature could not meet its tolerance.
class QuadratureFailureError : public Error {
public:
    using Error::Error;
};

/// Normalizer S(1)*xi(p(x)) is zero, negative, or non-finite.
class DegenerateNormalizerError : public Error {
public:
    using Error::Error;
};

/// Extrapolated limit estimates failed to settle.
class LimitEstimateFailureError : public Error {
public:
    using Error::Error;
};

} // namespace boasbuck
