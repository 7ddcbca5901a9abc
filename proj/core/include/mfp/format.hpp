#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mfp {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Strict whole-token parse; accepts "inf", "-inf" and "nan".
std::optional<double> parse_double(std::string_view text);

}  // namespace mfp
