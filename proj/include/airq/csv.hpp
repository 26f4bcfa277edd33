#pragma once
#include <string>
#include <vector>

namespace airq::csv {

// Splits one CSV record. Double-quoted fields may contain commas and
// doubled quotes. No embedded newlines.
std::vector<std::string> split_record(const std::string& line);

// Quotes a field only when it contains a comma, quote, or leading/trailing
// whitespace.
std::string quote_field(const std::string& field);

std::string join_record(const std::vector<std::string>& fields);

// Reads all records from a file. Skips blank lines. Throws IoError if the
// file cannot be opened.
std::vector<std::vector<std::string>> read_file(const std::string& path);

// Shortest representation that round-trips the exact double value.
std::string format_double(double v);

// Strict numeric parses; throw ParseError on trailing garbage or overflow.
double parse_double(const std::string& s);
long long parse_int(const std::string& s);
unsigned long long parse_uint(const std::string& s);

}  // namespace airq::csv
