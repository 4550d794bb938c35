#pragma once

#include <stdexcept>
#include <string>

namespace ddro {

// Base class for every failure the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegativeMass : public Error {
public:
    using Error::Error;
};

class NotNormalized : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class CountOutOfRange : public Error {
public:
    using Error::Error;
};

class NonPositiveRadius : public Error {
public:
    using Error::Error;
};

class NonPositiveLambda : public Error {
public:
    using Error::Error;
};

// Raised when a dual-objective exponent would overflow; solvers treat it as
// a failed step and backtrack.
class OverflowGuard : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class InfeasibleParam : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class ModelGradientMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace ddro
