#pragma once

#include <stdexcept>
#include <string>

namespace rague {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidResponse : Error { using Error::Error; };
struct WeightMismatch : Error { using Error::Error; };
struct EmptyBundle : Error { using Error::Error; };
struct DegenerateCluster : Error { using Error::Error; };
struct InvalidSimilarity : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct ScorerUnavailable : Error { using Error::Error; };
struct NotPaired : Error { using Error::Error; };
struct InvalidScore : Error { using Error::Error; };
struct FitUndefined : Error { using Error::Error; };
struct NoReference : Error { using Error::Error; };
struct Undefined : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct ParseError : Error {
    long line = -1;
    ParseError(const std::string& msg, long line_no = -1)
        : Error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
};
struct VersionError : Error { using Error::Error; };
struct CapabilityError : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };

}  // namespace rague
