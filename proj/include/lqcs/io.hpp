#ifndef LQCS_IO_HPP
#define LQCS_IO_HPP

#include <string>

#include "lqcs/core.hpp"

namespace lqcs {

// Vector files: one decimal value per line; blank lines and lines starting
// with '#' are ignored. Matrix files: CSV, one row per line, no header.
// Parsing and formatting are locale-independent ('.' decimal point always).

Vector read_vector(const std::string& path);
Matrix read_matrix_csv(const std::string& path);

void write_vector(const std::string& path, const Vector& v);
void write_matrix_csv(const std::string& path, const Matrix& a);

// Shortest round-trip decimal form of a double (to_chars), used everywhere a
// number is printed so that output bytes are reproducible.
std::string format_double(double x);

}  // namespace lqcs

#endif  // LQCS_IO_HPP
