#pragma once

#include <stdexcept>
#include <string>

namespace tonal {

// Error categories map onto CLI exit codes:
//   ConfigError -> 1, DataError -> 2, NumericError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// ingest
struct MalformedManifest final : DataError { using DataError::DataError; };
struct MissingFile final : DataError { using DataError::DataError; };
struct DuplicateWordId final : DataError { using DataError::DataError; };
struct UnsupportedFormat final : DataError { using DataError::DataError; };
struct CorruptHeader final : DataError { using DataError::DataError; };
struct OverlappingSpans final : DataError { using DataError::DataError; };
struct NonContiguousIndices final : DataError { using DataError::DataError; };
struct MalformedRow final : DataError { using DataError::DataError; };

// pitch
struct AudioTooShort final : DataError { using DataError::DataError; };
struct InsufficientVoicedFrames final : DataError { using DataError::DataError; };
struct InsufficientRange final : DataError { using DataError::DataError; };
struct TooFewVoicedFrames final : DataError { using DataError::DataError; };
struct TooFewPoints final : DataError { using DataError::DataError; };

// nn / autoencoder
struct ShapeMismatch final : NumericError { using NumericError::NumericError; };
struct NonFiniteGradient final : NumericError { using NumericError::NumericError; };
struct NonFiniteLoss final : NumericError { using NumericError::NumericError; };

// cluster
struct DegenerateCovariance final : NumericError { using NumericError::NumericError; };
struct AllClustersSpurious final : NumericError { using NumericError::NumericError; };

// eval
struct LengthMismatch final : DataError { using DataError::DataError; };
struct EmptyTable final : DataError { using DataError::DataError; };

// synth
struct InvalidFrequency final : ConfigError { using ConfigError::ConfigError; };

}  // namespace tonal
