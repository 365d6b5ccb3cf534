#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace sgwp::app {

/// Shortest round-trippable text (17 significant digits, '.' decimal point).
std::string format_double(double v);

/// Writes one RFC 4180 record; fields containing separators or quotes are quoted.
void write_row(std::ostream& os, std::span<const std::string> fields);
void write_row(std::ostream& os, std::span<const double> values);

}  // namespace sgwp::app
