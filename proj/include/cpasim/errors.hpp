#pragma once

#include <stdexcept>
#include <string>

namespace cpasim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The intracavity-field denominator vanishes: the cavity sits at the
/// parametric-oscillation threshold and the steady field is undefined.
class ParametricSingularity : public Error {
public:
    using Error::Error;
};

/// beta = kappa/2 + 2|G|cos(phi) is not positive; CPA analysis is undefined.
class NonPositiveBeta : public Error {
public:
    using Error::Error;
};

/// No detuning window admits CPA for the requested coupling.
class Infeasible : public Error {
public:
    using Error::Error;
};

class AsymmetricMirrors : public Error {
public:
    using Error::Error;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

class MalformedCurve : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cpasim
