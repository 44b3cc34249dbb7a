#include "rrmdqw/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace rrmdqw {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_lf(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

}  // namespace

void write_series_csv(const std::filesystem::path& path, const std::string& config_comment,
                      const std::string& x_name, const Series& series, long long n) {
    auto out = open_lf(path);
    out << "# " << config_comment << "\n";
    out << x_name << ",value,stderr,n\n";
    for (size_t i = 0; i < series.size(); ++i)
        out << format_double(series.x[i]) << ',' << format_double(series.y[i]) << ','
            << format_double(series.se_at(i)) << ',' << n << "\n";
}

}  // namespace rrmdqw
