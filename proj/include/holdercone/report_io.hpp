#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

namespace holdercone {

/// Renders a double with 17 significant digits ("%.17g"), which round-trips
/// every 64-bit value. Non-finite values render as "inf", "-inf" or "nan".
std::string format_number(double v);

/// JSON value for a possibly infinite number: finite values stay numbers,
/// +/-infinity becomes the string "inf" / "-inf".
nlohmann::json number_or_inf(double v);

/// Inverse of number_or_inf().
double number_from_json(const nlohmann::json& j);

/// Deterministic JSON text: object keys in sorted order, floating point
/// numbers through format_number(), two-space indentation.
std::string dump_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace holdercone
