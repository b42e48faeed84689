#include "holofol/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace holofol {

namespace {

double parse_real_strict(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("bad complex literal: empty component");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw std::invalid_argument("bad complex literal component: '" + s + "'");
    return v;
}

} // namespace

cplx parse_complex(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty complex literal");
    if (text.find_first_of(" \t") != std::string::npos)
        throw std::invalid_argument("complex literal must not contain spaces");

    if (text.back() != 'i' && text.back() != 'I')
        return cplx(parse_real_strict(text), 0.0);

    std::string body = text.substr(0, text.size() - 1);
    // split at the last +/- that is not an exponent sign and not leading
    size_t split = std::string::npos;
    for (size_t p = body.size(); p-- > 1;) {
        char c = body[p];
        if ((c == '+' || c == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
            split = p;
            break;
        }
    }
    if (split == std::string::npos) {
        // pure imaginary: "i", "-i", "2i", "1.5e-3i"
        if (body.empty() || body == "+") return cplx(0.0, 1.0);
        if (body == "-") return cplx(0.0, -1.0);
        return cplx(0.0, parse_real_strict(body));
    }
    std::string re = body.substr(0, split);
    std::string im = body.substr(split);
    double iv;
    if (im == "+") iv = 1.0;
    else if (im == "-") iv = -1.0;
    else iv = parse_real_strict(im);
    return cplx(parse_real_strict(re), iv);
}

std::vector<cplx> parse_complex_list(const std::string& text) {
    std::vector<cplx> out;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, ','))
        out.push_back(parse_complex(cur));
    if (out.empty()) throw std::invalid_argument("empty complex list");
    return out;
}

std::string format_complex(cplx z) {
    if (z.imag() == 0.0) return fmt_double(z.real());
    std::string s = fmt_double(z.real());
    s += z.imag() < 0.0 ? "-" : "+";
    s += fmt_double(std::fabs(z.imag()));
    s += "i";
    return s;
}

std::string fmt_double(double v) {
    if (v == 0.0) return "0"; // normalize -0.0 for stable output
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ",";
        out += csv_field(fields[i]);
    }
    out += "\n";
    return out;
}

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        cfg.entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string ConfigFile::dump() const {
    std::string out;
    for (const auto& [k, v] : entries) {
        out += k;
        out += "=";
        out += v;
        out += "\n";
    }
    return out;
}

const std::string* ConfigFile::find(const std::string& key) const {
    const std::string* hit = nullptr;
    for (const auto& [k, v] : entries)
        if (k == key) hit = &v;
    return hit;
}

} // namespace holofol
