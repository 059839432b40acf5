#pragma once

#include <stdexcept>
#include <string>

namespace optsub {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NonPositiveVariance : Error {
    using Error::Error;
};
struct TooFewRows : Error {
    using Error::Error;
};
struct SingularInformation : Error {
    using Error::Error;
};
struct KLargerThanN : Error {
    using Error::Error;
};
struct KTooSmall : Error {
    using Error::Error;
};
struct InvalidDegrees : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct NonPositiveSigma : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};
struct MissingSeries : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace optsub
