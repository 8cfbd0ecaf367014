#pragma once

#include <string>
#include <vector>

namespace ddlti {

// 17 significant digits, enough for an exact binary64 round trip.
std::string format_double(double v);

// Parses a full decimal token; throws InvalidInput naming field on failure.
double parse_double(const std::string& token, const std::string& field);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ddlti
