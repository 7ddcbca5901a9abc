#include "mfp/error.hpp"

namespace mfp {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid argument";
    case Errc::kNoPropagatingModes: return "no propagating modes";
    case Errc::kNearFieldRange: return "near-field range";
    case Errc::kZeroReplica: return "zero replica";
    case Errc::kDegenerateReplica: return "degenerate replica";
    case Errc::kReconstructionFailure: return "reconstruction failure";
    case Errc::kEmptySurface: return "empty surface";
    case Errc::kMalformedFile: return "malformed file";
    case Errc::kDimensionMismatch: return "dimension mismatch";
    case Errc::kNonFiniteValue: return "non-finite value";
    case Errc::kIo: return "i/o error";
  }
  return "unknown error";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace mfp
