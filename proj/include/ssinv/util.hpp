#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ssinv {

// Shortest decimal form that parses back to the identical double.
// Locale-independent, used for every number we write to disk.
std::string format_double(double v);

// Strict parsers: '.' decimal separator, no locale, no trailing junk.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, int& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep);

std::uint64_t fnv1a64(std::string_view data);

// Independent child stream seed; stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

double mean_of(const std::vector<double>& v);
double median_of(std::vector<double> v);
double sample_stddev(const std::vector<double>& v);

}  // namespace ssinv
