#pragma once

#include <stdexcept>
#include <string>

namespace sobolow {

// Base class for every domain error thrown by the library. Programming errors
// (bad sizes, out-of-range indices into containers) use the std exceptions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point lies outside the support of the distribution.
class OutsideSupport : public Error { public: using Error::Error; };

// Truncation interval carries no probability mass.
class EmptyMass : public Error { public: using Error::Error; };

// The score / Fisher information route does not apply to this law
// (flat density, non-square-integrable score, ...).
class UnsupportedForBounds : public Error { public: using Error::Error; };

// Operation requires a bounded support and the caller forbade clipping.
class UnboundedSupport : public Error { public: using Error::Error; };

// Density vanished (or was not finite) on an entire grid cell, so the
// discretized mass matrix would be singular.
class SingularMass : public Error { public: using Error::Error; };

// No closed-form spectrum is known for this law.
class NoClosedForm : public Error { public: using Error::Error; };

// Requested eigenpair index exceeds the stored truncation.
class OutOfRange : public Error { public: using Error::Error; };

// First nonzero eigenvalue missing or non-positive.
class DegenerateSpectrum : public Error { public: using Error::Error; };

// Estimator needs gradient columns and the sample has none.
class MissingGradients : public Error { public: using Error::Error; };

// Multi-index does not activate the target variable.
class InactiveIndex : public Error { public: using Error::Error; };

// Multi-index set mixes patterns that belong to different targets.
class MixedPattern : public Error { public: using Error::Error; };

// Estimator defined only for Uniform(0,1) inputs.
class NotUniform01 : public Error { public: using Error::Error; };

// Tensorized oracle refuses to build a grid in this many dimensions.
class DimensionTooLarge : public Error { public: using Error::Error; };

// Test function has no analytic variance decomposition.
class NoAnalyticForm : public Error { public: using Error::Error; };

// Physical model parameters outside the meaningful domain.
class InvalidPhysicalParams : public Error { public: using Error::Error; };

// Model needs per-point face values and none are available.
class MissingFaceValues : public Error { public: using Error::Error; };

// Malformed or inconsistent run configuration.
class ConfigInvalid : public Error { public: using Error::Error; };

// Named model not in the registry.
class ModelUnknown : public Error { public: using Error::Error; };

} // namespace sobolow
