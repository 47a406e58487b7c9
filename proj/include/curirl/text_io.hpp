#pragma once

#include <string>
#include <string_view>

namespace curirl {

/// Decimal text with 17 significant digits; parses back to the identical double.
std::string format_double(double value);

/// Parses a whole string as a double; returns false on junk or empty input.
bool parse_double(std::string_view text, double& out);

std::string_view trim(std::string_view text);

} // namespace curirl
