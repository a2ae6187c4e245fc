#pragma once

#include <stdexcept>
#include <string>

namespace gapdyn {

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotHermitianError : Error {
    using Error::Error;
};
struct NotNormalError : Error {
    using Error::Error;
};
struct SpectraOverlapError : Error {
    using Error::Error;
};
struct DimensionMismatchError : Error {
    using Error::Error;
};
struct IndexOutOfRangeError : Error {
    using Error::Error;
};
struct InvalidParamError : Error {
    using Error::Error;
};
struct GapTooSmallError : Error {
    using Error::Error;
};
struct EmptyBandError : Error {
    using Error::Error;
};
struct NoComplementError : Error {
    using Error::Error;
};
struct GapZeroError : Error {
    using Error::Error;
};
struct SeriesDivergingError : Error {
    using Error::Error;
};
struct ConvergenceViolatedError : Error {
    using Error::Error;
};
struct NegativeInputError : Error {
    using Error::Error;
};
struct BandNotRankOneError : Error {
    using Error::Error;
};
struct ThresholdNeverCrossedError : Error {
    using Error::Error;
};
struct NoDfsError : Error {
    using Error::Error;
};
struct DfsViolationError : Error {
    using Error::Error;
};
struct SingularSError : Error {
    using Error::Error;
};
struct NotSaturatedError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace gapdyn
