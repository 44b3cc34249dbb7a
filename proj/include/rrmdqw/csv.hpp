#pragma once

#include <filesystem>
#include <string>

#include "rrmdqw/types.hpp"

namespace rrmdqw {

/// Locale-independent formatting with 17 significant digits, enough to
/// round-trip any double exactly.
std::string format_double(double v);

/// Writes "abscissa,value,stderr,n" rows with an LF-terminated header and a
/// leading "# {config json}" comment so every file carries the exact
/// configuration and seed that produced it.
void write_series_csv(const std::filesystem::path& path, const std::string& config_comment,
                      const std::string& x_name, const Series& series, long long n);

}  // namespace rrmdqw
