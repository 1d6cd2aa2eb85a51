// errors.hpp — exception types thrown across the library

#pragma once

#include <stdexcept>
#include <string>

namespace rcc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// spectral kernel
struct DimensionMismatch : Error { using Error::Error; };
struct NonHermitian : Error { using Error::Error; };

// operator representations
struct IncompatibleShapes : Error { using Error::Error; };
struct UnsupportedComposition : Error { using Error::Error; };
struct NotSelfAdjoint : Error { using Error::Error; };

// moduli
struct NotCompactWitness : Error { using Error::Error; };

// certification pipeline
struct HypothesisViolated : Error { using Error::Error; };
struct MissingOverride : Error { using Error::Error; };
struct TruncationUnavailable : Error { using Error::Error; };
struct PartitionMismatch : Error { using Error::Error; };

// input documents
struct DocumentError : Error { using Error::Error; };

}  // namespace rcc
