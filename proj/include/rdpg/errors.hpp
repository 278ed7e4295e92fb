#pragma once

#include <stdexcept>

namespace rdpg {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched or invalid matrix/vector shapes, including symmetry contracts.
struct ShapeError : Error {
  using Error::Error;
};

// A value lies outside its admissible domain (e.g. probability not in [0,1]).
struct DomainError : Error {
  using Error::Error;
};

// Not enough usable spectral components for the requested embedding dimension.
struct DimensionError : Error {
  using Error::Error;
};

// Rank-deficient input where full column rank is required.
struct RankDeficiencyError : Error {
  using Error::Error;
};

// Linear system is singular / not positive definite.
struct SingularSystemError : Error {
  using Error::Error;
};

// Gradient iteration diverged; the step size should be reduced.
struct StepSizeError : Error {
  using Error::Error;
};

// Retraction failed because the candidate point lost rank.
struct RetractionError : Error {
  using Error::Error;
};

// Argument is not a valid manifold point.
struct ManifoldError : Error {
  using Error::Error;
};

// Invalid solver/tracker configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Unknown node id.
struct NodeLookupError : Error {
  using Error::Error;
};

// File parsing / file system problems.
struct IoError : Error {
  using Error::Error;
};

}  // namespace rdpg
