#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfp {

enum class Errc {
  kInvalidArgument,
  kNoPropagatingModes,
  kNearFieldRange,
  kZeroReplica,
  kDegenerateReplica,
  kReconstructionFailure,
  kEmptySurface,
  kMalformedFile,
  kDimensionMismatch,
  kNonFiniteValue,
  kIo,
};

std::string_view to_string(Errc code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mfp
