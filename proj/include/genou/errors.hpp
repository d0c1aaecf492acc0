#pragma once

#include <stdexcept>
#include <string>

namespace genou {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// levy_models
class DomainError : public Error { using Error::Error; };
class NoPositiveRoot : public Error { using Error::Error; };
class NotStationaryHeavyTail : public Error { using Error::Error; };

// simulation / configuration
class InvalidConfig : public Error { using Error::Error; };

// theory_constants
class PreconditionViolated : public Error { using Error::Error; };
class TruncationWarning : public Error { using Error::Error; };
class EstimationUnstable : public Error { using Error::Error; };

// extreme_stats
class InsufficientData : public Error { using Error::Error; };
class NonPositiveData : public Error { using Error::Error; };
class NoExceedances : public Error { using Error::Error; };
class TooFewExceedances : public Error { using Error::Error; };
class BoundaryAlpha : public Error { using Error::Error; };

// cli_experiments
class ParseError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class MissingArtifact : public Error { using Error::Error; };

}  // namespace genou
