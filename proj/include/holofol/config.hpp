#pragma once

// Line-oriented key=value configuration, complex literals of the form
// "a+bi" (no spaces), and byte-stable number/CSV formatting shared by the
// CLI and the report writers.

#include <string>
#include <utility>
#include <vector>

#include "holofol/linear_model.hpp"

namespace holofol {

cplx parse_complex(const std::string& text);              // throws std::invalid_argument
std::vector<cplx> parse_complex_list(const std::string&); // comma-separated
std::string format_complex(cplx z);

// shortest representation that parses back to the same double
std::string fmt_double(double v);

// RFC-style CSV quoting: quotes fields containing comma, quote or newline
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

struct ConfigFile {
    std::vector<std::pair<std::string, std::string>> entries; // insertion order

    static ConfigFile parse(const std::string& text); // throws on malformed lines
    static ConfigFile load(const std::string& path);  // throws if unreadable

    std::string dump() const; // canonical key=value lines
    const std::string* find(const std::string& key) const; // last occurrence wins
};

} // namespace holofol
