#pragma once

#include <stdexcept>
#include <string>

namespace transport {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };
struct OneClassOnly : Error { using Error::Error; };
struct TooFewDistinctValues : Error { using Error::Error; };
struct UnknownColumn : Error { using Error::Error; };
struct MissingValue : Error { using Error::Error; };
struct NonpositiveProbability : Error { using Error::Error; };
struct NoTargetUnits : Error { using Error::Error; };
struct ZeroWeightSum : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct TooManyFailures : Error { using Error::Error; };
struct DegenerateCohort : Error { using Error::Error; };
struct SchemaViolation : Error { using Error::Error; };
struct EmptyAfterFiltering : Error { using Error::Error; };
struct InvalidDataset : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace transport
