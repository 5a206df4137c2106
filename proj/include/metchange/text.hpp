#ifndef METCHANGE_TEXT_HPP
#define METCHANGE_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace metchange::text {

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Fixed-point rendering used by every TSV writer.
std::string fixed(double value, int decimals = 6);

// Two decimals without the leading zero, as in printed tables: ".64", "-.10", "1.00".
std::string short_decimal(double value);

// Strict numeric parsing; throw FormatError naming `what`.
long long parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

// Strip a trailing '\r' so files written on Windows parse identically.
void chomp(std::string& line);

} // namespace metchange::text

#endif
