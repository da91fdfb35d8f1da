// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_ERRORS_HPP
#define CLCRN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace clcrn {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct DegenerateMap : Error { using Error::Error; };
struct PoleCenter : Error { using Error::Error; };
struct NotAPole : Error { using Error::Error; };

// graph
struct TooFewNodes : Error { using Error::Error; };
struct DuplicatePoints : Error { using Error::Error; };
struct EmptyNeighborhood : Error { using Error::Error; };
struct GeometryMismatch : Error { using Error::Error; };

// autodiff
struct ShapeMismatch : Error { using Error::Error; };
struct NotScalarLoss : Error { using Error::Error; };
struct NotTraced : Error { using Error::Error; };

// model
struct MissingTruth : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };
struct EmptySplit : Error { using Error::Error; };

// data
struct MissingFile : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
struct BadCoordinate : Error { using Error::Error; };
struct ZeroStd : Error { using Error::Error; };
struct StabilityViolated : Error { using Error::Error; };

// cli / configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace clcrn

#endif
