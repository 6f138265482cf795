#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace invbench::csv {

/// RFC-4180 field quoting: quoted only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Parses a whole RFC-4180 document (CRLF or LF line endings).
std::vector<std::vector<std::string>> parse(std::istream& in);

/// %.17g, enough digits to round-trip any double.
std::string format_double(double v);

}  // namespace invbench::csv
