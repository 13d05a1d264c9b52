#pragma once

#include "novlab/grid.hpp"

#include <iosfwd>
#include <string>

namespace novlab {

// Two-column CSV: x,value per line, no header.  Values are written with 17
// significant digits so doubles round-trip exactly.
void write_field_csv(const Field& u, const std::string& path);
Field read_field_csv(const std::string& path);

// Binary layout, little-endian: f64 x_left, f64 dx, i64 n, then n f64 values.
void write_field_binary(const Field& u, const std::string& path);
Field read_field_binary(const std::string& path);

// Formats a double with enough digits to round-trip (%.17g).
std::string format_double(double v);

} // namespace novlab
