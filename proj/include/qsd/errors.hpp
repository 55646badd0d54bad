#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qsd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rejected inputs: bad parameters, violated preconditions, malformed configs.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

// A well-posed computation that could not be carried out to tolerance.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

#define QSD_DEFINE_ERROR(name, base) \
    class name : public base {       \
    public:                          \
        using base::base;            \
    };

QSD_DEFINE_ERROR(NonHermitianInput, InvalidParameter)
QSD_DEFINE_ERROR(ZeroField, InvalidParameter)
QSD_DEFINE_ERROR(OutOfDomain, InvalidParameter)
QSD_DEFINE_ERROR(DegenerateOverlap, InvalidParameter)
QSD_DEFINE_ERROR(DegenerateSpectrum, InvalidParameter)
QSD_DEFINE_ERROR(OffDiagonalZero, InvalidParameter)
QSD_DEFINE_ERROR(ZeroGap, InvalidParameter)
QSD_DEFINE_ERROR(NonHermitianField, InvalidParameter)
QSD_DEFINE_ERROR(NonDifferentiableField, InvalidParameter)
QSD_DEFINE_ERROR(GridTooSmall, InvalidParameter)
QSD_DEFINE_ERROR(SingularRatio, InvalidParameter)
QSD_DEFINE_ERROR(ZeroSweepRate, InvalidParameter)
QSD_DEFINE_ERROR(ConfigError, InvalidParameter)

QSD_DEFINE_ERROR(StepSizeUnderflow, NumericalFailure)
QSD_DEFINE_ERROR(QuadratureFailure, NumericalFailure)
QSD_DEFINE_ERROR(VanishingAlpha, NumericalFailure)
QSD_DEFINE_ERROR(LongitudinalSingularity, NumericalFailure)

#undef QSD_DEFINE_ERROR

inline double require_finite(double v, const char* what)
{
    if (!std::isfinite(v))
        throw InvalidParameter(std::string(what) + " must be finite");
    return v;
}

} // namespace qsd
