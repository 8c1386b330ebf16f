#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace optreg {

/// Shortest decimal rendering that parses back to the same double;
/// "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double v);

/// Parses a real written by format_real (also accepts "inf"/"nan").
double parse_real(std::string_view s);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace optreg
